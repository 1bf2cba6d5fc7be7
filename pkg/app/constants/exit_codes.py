class ExitCodes:
    SUCCESS = 0
    USAGE = 1
    IO = 2
    VERIFICATION = 3
