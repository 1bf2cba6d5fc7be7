from app.utils.file_system import FileSystem
from app.utils.env_manager import EnvManager
from app.utils.cli_error_handler import CatchCLIException

class UtilityManager(FileSystem, EnvManager, CatchCLIException):
    def __init__(self):
        super().__init__()
