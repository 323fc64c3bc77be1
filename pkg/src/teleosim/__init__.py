"""Desk-scale teleoperation sandbox.

A simulated goal-tracking arm and a human operator client exchange compact
UDP messages: the controller streams the scene (end effector plus tracked
objects), the client streams gripper goals gated by a workspace guard. A
local gateway mirrors the client state to a browser console.
"""

__version__ = "0.1.0"

from .geometry import Pose, Twist
from .messages import (
    GoalCommandMessage,
    ObjectCreate,
    ObjectSpec,
    ObjectUpdate,
    SceneUpdateMessage,
)

__all__ = [
    "Pose",
    "Twist",
    "ObjectSpec",
    "ObjectUpdate",
    "ObjectCreate",
    "SceneUpdateMessage",
    "GoalCommandMessage",
]
