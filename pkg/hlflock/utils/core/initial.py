import numpy as np

from hlflock.utils.core.state import FlockState, Frame
from hlflock.utils.interactions.rng import Channel, RngStream


# Function to draw a random initial flock
def sample_initial_state(k, box_side, speed, stream: RngStream) -> FlockState:
    """
    Samples positions uniformly in the box [0, L)^3 and velocities uniformly in
    the ball of radius ``speed``, from the t = 0 blocks of the stream.

    Args:
        k (int): Number of birds.
        box_side (float): Side L of the position box.
        speed (float): Radius of the velocity ball.
        stream (RngStream): Stream of the replica.

    Returns:
        FlockState: Absolute-frame state at t = 0.
    """
    positions = box_side * stream.generator(0, Channel.POSITIONS).random((k, 3))

    generator = stream.generator(0, Channel.VELOCITIES)
    directions = generator.standard_normal((k, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = speed * np.cbrt(generator.random(k))
    velocities = directions * radii[:, None]

    return FlockState(t=0, x=positions, v=velocities, frame=Frame.ABSOLUTE)
