"""einstein-pinch: curvature algebra and pinching checks for Einstein four-manifolds."""

__version__ = "0.1.0"
