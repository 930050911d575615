# Grid Lab frequency-control backend
# Network model, costs, dispatch, controllers, dynamics, analysis and the experiment harness

__all__ = ["network", "costs", "dispatch", "controllers", "dynamics", "analysis", "harness", "tasks"]
