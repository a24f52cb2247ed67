import hashlib

# Fixed, published mixing scheme: sha256 over "<master seed>:<replica>".
# Changing it changes every stored trajectory.
SEED_MIX_FORMAT = "{seed}:{replica}"


# Generate a hash from an input string
def generate_hash(input_string):
    """
    Generates a SHA-256 hash from a string.

    Args:
        input_string (str): The input string to hash.

    Returns:
        str: The resulting hex digest.
    """
    return hashlib.sha256(input_string.encode()).hexdigest()


# Derive the Philox key of one replica
def mix_seed(seed, replica):
    """
    Mixes a master seed and a replica id into a 128-bit stream key.

    Adding replicas never perturbs existing ones because each key depends only
    on its own (seed, replica) pair.

    Args:
        seed (int): Master seed, a non-negative 64-bit integer.
        replica (int): Replica index, non-negative.

    Returns:
        int: Key in [0, 2**128).
    """
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if replica < 0:
        raise ValueError(f"replica must be non-negative, got {replica}")
    digest = generate_hash(SEED_MIX_FORMAT.format(seed=int(seed), replica=int(replica)))
    return int(digest[:32], 16)
