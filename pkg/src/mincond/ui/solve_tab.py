from PySide6.QtWidgets import (
    QWidget,
    QVBoxLayout,
    QHBoxLayout,
    QLabel,
    QLineEdit,
    QComboBox,
    QSpinBox,
    QPushButton,
    QProgressBar,
    QFileDialog,
    QMessageBox,
)
from PySide6.QtCore import Qt, QThread, Signal
from superqt import QLabeledDoubleSlider

from mincond.core.bench import ALGORITHMS, ExperimentConfig, SummaryRow, run_experiment
from mincond.core.errors import MincondError
from mincond.core.engine import format_decimal
from mincond.core.genetic import DEFAULT_POP_SIZE, DEFAULT_TOURNAMENT_SIZE
from mincond.core.local_search import DEFAULT_MOVE_MIX

RESULTS_DIR = "results"
MAX_TIME_LIMIT = 900.0


def format_summary(row: SummaryRow) -> str:
    return (f"{row.graph_name} / {row.algorithm}: min {row.min_phi.display()}, "
            f"mean {format_decimal(row.mean_phi)}, success {row.success_rate}")


def create_solve_tab() -> QWidget:
    tab = QWidget()
    layout = QVBoxLayout(tab)
    tab.refresh_targets = []

    def add_refresh_target(target_func):
        tab.refresh_targets.append(target_func)

    tab.add_refresh_target = add_refresh_target

    # Instance
    instance_layout = QHBoxLayout()
    instance_edit = QLineEdit()
    instance_edit.setPlaceholderText("Edge list file")
    browse_button = QPushButton("Browse...")
    instance_layout.addWidget(QLabel("Instance:"))
    instance_layout.addWidget(instance_edit)
    instance_layout.addWidget(browse_button)
    layout.addLayout(instance_layout)

    # Algorithm and runs
    algorithm_layout = QHBoxLayout()
    algorithm_combo = QComboBox()
    algorithm_combo.addItems(list(ALGORITHMS))
    algorithm_combo.setCurrentText("sts-ama")
    runs_spin = QSpinBox()
    runs_spin.setRange(1, 1000)
    runs_spin.setValue(10)
    algorithm_layout.addWidget(QLabel("Algorithm:"))
    algorithm_layout.addWidget(algorithm_combo)
    algorithm_layout.addWidget(QLabel("Runs:"))
    algorithm_layout.addWidget(runs_spin)
    layout.addLayout(algorithm_layout)

    # Time limit in seconds
    time_layout = QHBoxLayout()
    time_slider = QLabeledDoubleSlider(Qt.Horizontal)
    time_slider.setRange(1.0, MAX_TIME_LIMIT)
    time_slider.setValue(60.0)
    time_layout.addWidget(QLabel("Time limit (s):"))
    time_layout.addWidget(time_slider)
    layout.addLayout(time_layout)

    # Flip probability of RLS12
    mix_layout = QHBoxLayout()
    mix_slider = QLabeledDoubleSlider(Qt.Horizontal)
    mix_slider.setRange(0.0, 1.0)
    mix_slider.setValue(DEFAULT_MOVE_MIX)
    mix_layout.addWidget(QLabel("Flip probability:"))
    mix_layout.addWidget(mix_slider)
    layout.addLayout(mix_layout)

    # Population
    population_layout = QHBoxLayout()
    pop_spin = QSpinBox()
    pop_spin.setRange(2, 10000)
    pop_spin.setSingleStep(2)
    pop_spin.setValue(DEFAULT_POP_SIZE)
    tournament_spin = QSpinBox()
    tournament_spin.setRange(1, 100)
    tournament_spin.setValue(DEFAULT_TOURNAMENT_SIZE)
    population_layout.addWidget(QLabel("Population:"))
    population_layout.addWidget(pop_spin)
    population_layout.addWidget(QLabel("Tournament:"))
    population_layout.addWidget(tournament_spin)
    layout.addLayout(population_layout)

    run_button = QPushButton("Run Experiment")
    layout.addWidget(run_button)

    progress_bar = QProgressBar()
    status_label = QLabel("Pick an instance to start.")
    result_label = QLabel("")
    result_label.setTextInteractionFlags(Qt.TextSelectableByMouse)
    layout.addWidget(progress_bar)
    layout.addWidget(status_label)
    layout.addWidget(result_label)
    layout.addStretch()

    def browse_instance():
        path, _ = QFileDialog.getOpenFileName(tab, "Select edge list", "", "Edge lists (*.txt *.edges *.csv);;All files (*)")
        if path:
            instance_edit.setText(path)
            for target in tab.refresh_targets:
                target(path)

    def build_config() -> ExperimentConfig:
        name = algorithm_combo.currentText()
        return ExperimentConfig(
            instance_path=instance_edit.text().strip(),
            algorithm=name,
            runs=runs_spin.value(),
            time_limit=time_slider.value(),
            pop_size=pop_spin.value(),
            tournament=tournament_spin.value(),
            move_mix=mix_slider.value(),
            out_summary=f"{RESULTS_DIR}/{name}_summary.csv",
            out_runs=f"{RESULTS_DIR}/{name}_runs.csv",
        )

    def start_experiment():
        if not instance_edit.text().strip():
            QMessageBox.warning(tab, "Warning", "Please select an instance.")
            return
        cfg = build_config()
        try:
            cfg.validate()
        except MincondError as e:
            QMessageBox.critical(tab, "Error", str(e))
            return

        run_button.setEnabled(False)
        status_label.setText(f"Running {cfg.runs} x {cfg.algorithm}...")
        result_label.setText("")
        progress_bar.setRange(0, 0)

        tab.worker = ExperimentWorker(cfg)
        tab.worker.finished.connect(on_experiment_finished)
        tab.worker.start()

    def on_experiment_finished(success: bool, message: str):
        run_button.setEnabled(True)
        progress_bar.setRange(0, 100)
        progress_bar.setValue(0)
        if success:
            status_label.setText("Experiment finished.")
            result_label.setText(message)
        else:
            status_label.setText("Experiment failed.")
            QMessageBox.critical(tab, "Error", f"Experiment failed: {message}")

    browse_button.clicked.connect(browse_instance)
    run_button.clicked.connect(start_experiment)

    tab.build_config = build_config
    tab.instance_edit = instance_edit

    return tab


class ExperimentWorker(QThread):
    finished = Signal(bool, str)

    def __init__(self, cfg: ExperimentConfig):
        super().__init__()
        self.cfg = cfg

    def run(self):
        try:
            _, summary = run_experiment(self.cfg)
            self.finished.emit(True, format_summary(summary))
        except Exception as e:
            self.finished.emit(False, str(e))
