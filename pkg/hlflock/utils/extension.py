import os

CONFIG_EXTENSIONS = (".json",)


# Function to get file extension
def get_file_extension(file_path):
    """
    Gets the extension of a file.

    Args:
        file_path (str): Path to the file.

    Returns:
        str: File extension in lowercase.
    """
    return os.path.splitext(str(file_path))[1].lower()


def is_config_file(file_path):
    return get_file_extension(file_path) in CONFIG_EXTENSIONS
