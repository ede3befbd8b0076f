import pytest

SMALL_GA = {"population_size": 30, "max_generations": 40, "stall_generations": 15}
SMALL_SCENARIO = {"n_sensors": 80, "area_width": 4000.0, "area_height": 4000.0}

SMALL_PARAMS = {
    "clustering_sweep": {"d_th_values": [900.0, 1700.0]},
    "solver_compare": {"k_values": [5, 6]},
    "tspn_gain": {"k_values": [6], "radius_values": [300.0, "auto"]},
    "altitude_gain": {"k": 6, "envs": ["suburban", "urban"], "z_values": [100.0, 2000.0, 20000.0]},
    "multi_uav": {"k_values": [8], "uav_values": [1, 2]},
    "fairness": {"k_values": [8], "uav_values": [2], "delta_values": [200.0, 5000.0]},
}


def small_config(name, replications=2, seed=3):
    return {
        "name": name,
        "scenario": dict(SMALL_SCENARIO),
        "ga": dict(SMALL_GA),
        "params": dict(SMALL_PARAMS[name]),
        "replications": replications,
        "base_seed": seed,
    }


@pytest.fixture
def small_cfg():
    return small_config


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
