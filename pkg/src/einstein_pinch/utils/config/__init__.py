from .settings import PinchConfig

__all__ = ["PinchConfig"]
