import logging
import logging.handlers
from dotenv import load_dotenv
from app.utils.utility_manager import UtilityManager
from app.enums.env_keys import EnvKeys
from app.enums.app_env_type import AppEnvironment
from app.constants.directory_names import DirectoryNames


class Settings(UtilityManager):

    DEFAULTS = {
        EnvKeys.APP_ENVIROMENT: AppEnvironment.DEVELOPMENT.value,
        EnvKeys.APP_LOGGING_LEVEL: 'INFO',
        EnvKeys.APP_LOGGING_FOLDER: DirectoryNames.LOGS,
        EnvKeys.APP_LOG_FILE: 'masksplat.log',
        EnvKeys.APP_LOGGING_FORMATTER: '%(asctime)s %(levelname)s %(name)s: %(message)s',
        EnvKeys.APP_LOGGING_DATEFORMAT: '%Y-%m-%d %H:%M:%S',
        EnvKeys.APP_LOGGING_MAXBYTES: '10485760',
        EnvKeys.APP_LOGGING_BACKUPCOUNT: '3',
        EnvKeys.OUTPUT_DIR: DirectoryNames.OUTPUT,
    }

    def __init__(self, log_to_file: bool = True):
        super().__init__()
        try:
            loaded = load_dotenv(".env")
            self.APP_ENVIROMENT = AppEnvironment(self._env(EnvKeys.APP_ENVIROMENT))
            self.OUTPUT_DIR = self._env(EnvKeys.OUTPUT_DIR)
            fmt = self._env(EnvKeys.APP_LOGGING_FORMATTER)
            level = self._env(EnvKeys.APP_LOGGING_LEVEL)
            log_folder = self._env(EnvKeys.APP_LOGGING_FOLDER)
            log_file = self._env(EnvKeys.APP_LOG_FILE)
            max_byte = int(self._env(EnvKeys.APP_LOGGING_MAXBYTES))
            backup_count = int(self._env(EnvKeys.APP_LOGGING_BACKUPCOUNT))
            date_format = self._env(EnvKeys.APP_LOGGING_DATEFORMAT)

            logging.getLogger().handlers.clear()
            handlers = []
            if log_to_file and self.APP_ENVIROMENT != AppEnvironment.TESTING:
                self.create_folder(folder_path=log_folder)
                handlers.append(logging.handlers.RotatingFileHandler(
                    f'{log_folder}/{log_file}',
                    maxBytes=max_byte,
                    backupCount=backup_count))
            # console handler goes to stderr so stdout stays clean for reports
            console = logging.StreamHandler()
            console.setLevel(level=level)
            console.setFormatter(logging.Formatter(fmt))
            handlers.append(console)
            logging.basicConfig(
                handlers=handlers,
                level=level,
                format=fmt,
                datefmt=date_format,
                force=True,
            )
            logging.getLogger('numba').setLevel(logging.WARNING)
            logging.info("Env-Loaded: {}".format(loaded))
            logging.info("Logging Configuration Set.")

        except Exception as err:
            logging.error("Error setting up logging configuration.")
            raise err

    def _env(self, key: EnvKeys) -> str:
        return self.get_env_variable(key.value, default=self.DEFAULTS[key])
