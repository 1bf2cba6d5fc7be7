import sys
from app.base.settings import Settings


class App:
    def __init__(self):
        # settings first: it loads .env (numba reads its env keys at import)
        self.settings = Settings()
        from app.cli.command_router import CommandRouter
        self.router = CommandRouter()

    def run(self, argv=None) -> int:
        return self.router.run(argv)


if __name__ == "__main__":
    app = App()
    sys.exit(app.run(sys.argv[1:]))
