import json
import logging
import os

from pydantic import BaseModel

from hlflock.utils.errors import OutputError
from hlflock.utils.writer.csv_writer import create_directory

logger = logging.getLogger(__name__)


def to_json(document):
    if isinstance(document, BaseModel):
        return document.model_dump_json(indent=2)
    return json.dumps(document, indent=2)


# Save a report as JSON
def save_json(document, file_path):
    """
    Writes a pydantic model or a plain mapping as indented JSON.

    Args:
        document (BaseModel | dict): The content to save.
        file_path (str): Destination.
    """
    try:
        create_directory(os.path.dirname(file_path) or ".")
        with open(file_path, "w") as f:
            f.write(to_json(document))
            f.write("\n")
    except OSError as e:
        logger.error(f"Error saving JSON: {e}")
        raise OutputError(f"cannot write {file_path}: {e}") from e
