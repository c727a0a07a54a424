"""Reference prediction server for the regionlogic remote protocol."""

from .models import ConstantModel, FormulaModel, TorchvisionClassifier, load_vocab
from .protocol import decode_image, error_response, handle_request_line, label_response
from .server import ServerConfig, make_http_server, serve, serve_stdio

__version__ = "0.1.0"

__all__ = [
    "ConstantModel",
    "FormulaModel",
    "TorchvisionClassifier",
    "load_vocab",
    "decode_image",
    "error_response",
    "handle_request_line",
    "label_response",
    "ServerConfig",
    "make_http_server",
    "serve",
    "serve_stdio",
    "__version__",
]
