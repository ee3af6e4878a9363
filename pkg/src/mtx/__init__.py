"""Class-model to RDBMS-model transformation toolkit."""

from .model import (
    Association,
    Attribute,
    Class,
    ClassModel,
    Column,
    Diagnostic,
    ElementId,
    FKey,
    ModelError,
    PrimitiveDataType,
    RdbmsModel,
    SourceSpan,
    Table,
)
from .textio import (
    ParseError,
    emit_ddl,
    parse_class_model,
    parse_rdbms_model,
    print_class_model,
    print_rdbms_model,
    print_traces,
)
from .transform import (
    ColumnSpec,
    TraceLink,
    TransformError,
    TransformResult,
    detect_cycles,
    flatten_association,
    flatten_attribute,
    merged_attribute_plan,
    transform,
)
from .validate import validate_class_model, validate_rdbms_model

__version__ = "0.1.0"
