from PySide6.QtWidgets import (
    QWidget,
    QVBoxLayout,
    QHBoxLayout,
    QLabel,
    QLineEdit,
    QPushButton,
    QListWidget,
    QProgressBar,
    QMessageBox,
)
from PySide6.QtCore import QThread, Signal

from mincond.core.bench import VerifyReport, verify_small


def describe_report(report: VerifyReport) -> list[str]:
    lines = [f"optimum of {report.graph_name}: {report.optimum.display()}"]
    for entry in report.entries:
        if entry.violation:
            verdict = "BELOW OPTIMUM"
        else:
            verdict = "optimal" if entry.reached else "not reached"
        lines.append(f"{entry.algorithm}: {entry.phi.display()} ({verdict})")
    return lines


def create_verify_tab() -> QWidget:
    tab = QWidget()
    layout = QVBoxLayout(tab)

    instance_layout = QHBoxLayout()
    instance_edit = QLineEdit()
    instance_edit.setPlaceholderText("Edge list with at most 24 vertices")
    instance_layout.addWidget(QLabel("Instance:"))
    instance_layout.addWidget(instance_edit)
    layout.addLayout(instance_layout)

    verify_button = QPushButton("Brute Force and Compare")
    layout.addWidget(verify_button)

    progress_bar = QProgressBar()
    status_label = QLabel("Ready.")
    results_list = QListWidget()
    layout.addWidget(progress_bar)
    layout.addWidget(status_label)
    layout.addWidget(results_list)

    def set_instance(path: str):
        instance_edit.setText(path)

    def start_verification():
        path = instance_edit.text().strip()
        if not path:
            QMessageBox.warning(tab, "Warning", "Please select an instance.")
            return

        verify_button.setEnabled(False)
        results_list.clear()
        status_label.setText("Enumerating all partitions...")
        progress_bar.setRange(0, 0)

        tab.worker = VerifyWorker(path)
        tab.worker.report_ready.connect(on_report)
        tab.worker.finished.connect(on_verification_finished)
        tab.worker.start()

    def on_report(lines: list):
        results_list.addItems(lines)

    def on_verification_finished(success: bool, message: str):
        verify_button.setEnabled(True)
        progress_bar.setRange(0, 100)
        progress_bar.setValue(0)
        status_label.setText(message)
        if not success:
            QMessageBox.critical(tab, "Error", f"Verification failed: {message}")

    verify_button.clicked.connect(start_verification)

    tab.set_instance = set_instance
    tab.results_list = results_list

    return tab


class VerifyWorker(QThread):
    finished = Signal(bool, str)
    report_ready = Signal(list)

    def __init__(self, input_path: str):
        super().__init__()
        self.input_path = input_path

    def run(self):
        try:
            report = verify_small(self.input_path)
            self.report_ready.emit(describe_report(report))
            if report.ok:
                self.finished.emit(True, "No algorithm went below the optimum.")
            else:
                self.finished.emit(False, "An algorithm reported a value below the optimum.")
        except Exception as e:
            self.finished.emit(False, str(e))
