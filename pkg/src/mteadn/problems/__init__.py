from .functions import BASE_KINDS, evaluate_base_function
from .io import TransformDataError, load_instance, load_transform_data, parse_transform_data
from .suite import INSTANCE_NAMES, SUITE_VERSION, build_builtin_suite, load_builtin, validate_suite
from .tasks import (
    InstanceDefinition,
    TaskDefinition,
    evaluate_task,
    optimal_decision,
    true_front_sample,
)

__all__ = [
    "BASE_KINDS",
    "INSTANCE_NAMES",
    "SUITE_VERSION",
    "InstanceDefinition",
    "TaskDefinition",
    "TransformDataError",
    "build_builtin_suite",
    "evaluate_base_function",
    "evaluate_task",
    "load_builtin",
    "load_instance",
    "load_transform_data",
    "optimal_decision",
    "parse_transform_data",
    "true_front_sample",
    "validate_suite",
]
