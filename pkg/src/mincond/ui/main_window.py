# type: ignore[import-untyped]
from PySide6.QtWidgets import QMainWindow, QTabWidget

from mincond.ui.solve_tab import create_solve_tab
from mincond.ui.verify_tab import create_verify_tab


class MainWindow(QMainWindow):
    def __init__(self):
        super().__init__()
        self.setWindowTitle("Min Conductance")
        self.setGeometry(100, 100, 800, 600)
        self.tabs = QTabWidget()
        self.setCentralWidget(self.tabs)
        self._create_tabs()

    def _create_tabs(self):
        self.solve_tab = create_solve_tab()
        self.verify_tab = create_verify_tab()

        self.tabs.addTab(self.solve_tab, "1. Solve")
        self.tabs.addTab(self.verify_tab, "2. Verify")

        # the verify tab reuses the instance picked for solving
        self.solve_tab.add_refresh_target(self.verify_tab.set_instance)  # type: ignore[attr-defined]
