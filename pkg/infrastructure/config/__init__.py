"""Configuration and dependency wiring infrastructure."""

from .app_config import LabConfig
from .dependency_injection import LabContainer, create_container, get_container, reset_container

__all__ = ["LabConfig", "LabContainer", "create_container", "get_container", "reset_container"]
