"""Per-user application data: logs and the default configuration file."""
from pathlib import Path
from typing import Dict

from platformdirs import user_config_dir, user_log_dir

from painleve_gap.consts import ENCODING

LOG_FILE_NAME = "painleve_gap.log"
CONFIG_FILE_NAME = "painleve_gap.conf"


class AppData:
    """
    Locations owned by one installation of painleve-gap.

    Directories are created on first access. The configuration file uses the
    ``key = value`` format of ``--config`` and is read before the file given
    on the command line. ``--save-config`` writes it.
    """

    def __init__(self, name: str):
        """Constructor."""
        self.name = name

    @property
    def log_dir(self) -> Path:
        """Rotating logs of CLI runs."""
        return _ensure(Path(user_log_dir(appname=self.name)))

    @property
    def log_path(self) -> Path:
        """Current log file."""
        return self.log_dir / LOG_FILE_NAME

    @property
    def config_path(self) -> Path:
        """Default configuration file, read when present."""
        return Path(user_config_dir(appname=self.name)) / CONFIG_FILE_NAME

    def save_config(self, values: Dict[str, str]):
        """Write ``key = value`` lines to the default configuration file."""
        lines = [f"{key} = {value}\n" for key, value in values.items()]
        _ensure(self.config_path.parent)
        self.config_path.write_text("".join(lines), encoding=ENCODING)

    def load_config_text(self) -> str:
        """Raw text of the default configuration file, empty if missing."""
        if not self.config_path.is_file():
            return ""
        return self.config_path.read_text(encoding=ENCODING)


def _ensure(directory: Path) -> Path:
    directory.mkdir(exist_ok=True, parents=True)
    return directory
