from enum import Enum

class EnvKeys(Enum):
    APP_ENVIROMENT='APP_ENVIROMENT'
    # Logging settings
    APP_LOG_FILE='APP_LOG_FILE'
    APP_LOGGING_LEVEL='APP_LOGGING_LEVEL'
    APP_LOGGING_FOLDER='APP_LOGGING_FOLDER'
    APP_LOGGING_FORMATTER='APP_LOGGING_FORMATTER'
    APP_LOGGING_DATEFORMAT='APP_LOGGING_DATEFORMATTER'
    APP_LOGGING_MAXBYTES='APP_LOGGING_MAXBYTES'
    APP_LOGGING_BACKUPCOUNT='APP_LOGGING_BACKUPCOUNT'
    # Folders
    OUTPUT_DIR='OUTPUT_DIR'
