import logging
import sys

from PySide6.QtWidgets import QApplication

from mincond.cli import LOG_FORMAT
from mincond.ui.main_window import MainWindow


def main():
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
    app = QApplication(sys.argv)
    app.setApplicationName("mincond")
    window = MainWindow()
    window.show()
    sys.exit(app.exec())


if __name__ == "__main__":
    main()
