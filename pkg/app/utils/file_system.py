import logging
import os
import tempfile
from pathlib import Path
from typing import Callable, Union


class FileSystem:
    def __init__(self) -> None:
        pass

    def create_folder(self, folder_path: Union[str, Path]) -> Path:
        folder_path = self.clean_path(path=folder_path)
        if not folder_path.exists():
            folder_path.mkdir(parents=True, exist_ok=True)
            logging.info("Folder created: {}".format(folder_path))
        return folder_path

    def atomic_write(self, file_path: Union[str, Path], writer: Callable[[Path], None]) -> Path:
        """Write through a temp file in the target folder, then rename over the target."""
        file_path = self.clean_path(path=file_path)
        self.create_folder(file_path.parent)
        fd, tmp_name = tempfile.mkstemp(dir=file_path.parent, prefix=".tmp-", suffix=file_path.suffix)
        os.close(fd)
        tmp_path = Path(tmp_name)
        try:
            writer(tmp_path)
            os.replace(tmp_path, file_path)
        except Exception:
            logging.error("Error writing file {}".format(file_path))
            if tmp_path.exists():
                tmp_path.unlink()
            raise
        return file_path

    def atomic_write_text(self, file_path: Union[str, Path], text: str) -> Path:
        return self.atomic_write(file_path, lambda tmp: tmp.write_text(text, encoding="utf-8"))

    def clean_path(self, path: Union[str, Path]) -> Path:
        cleaned_path = Path(path).resolve()
        if cleaned_path.is_symlink():
            raise ValueError("Access denied. Path is a symbolic link and cannot be accessed.")
        return cleaned_path
