class DirectoryNames:
    OUTPUT = 'output'
    LOGS = 'logs'
    RENDERS = 'renders'
