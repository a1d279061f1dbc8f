
from .config import Config
from .create_app import create_app
