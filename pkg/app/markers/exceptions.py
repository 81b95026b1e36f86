"""
Error hierarchy for the marker analysis.

Each class carries the CLI exit code and a machine-readable kind so that a
command can turn any library failure into an error record.
"""


class MarkersError(Exception):
    """Base class for every failure raised by the analysis."""

    exit_code = 3
    kind = 'analysis_error'

    def __init__(self, message, *, entity_id=None, component=None):
        super().__init__(message)
        self.message = message
        self.entity_id = entity_id
        self.component = component

    def with_context(self, *, entity_id=None, component=None):
        """Attach entity/component context without losing what is already set."""
        if entity_id is not None and self.entity_id is None:
            self.entity_id = entity_id
        if component is not None and self.component is None:
            self.component = component
        return self

    def as_record(self):
        return {
            'error': self.kind,
            'message': self.message,
            'entity_id': self.entity_id,
            'component': self.component,
            'exit_code': self.exit_code,
        }

    def __str__(self):
        prefix = []
        if self.entity_id is not None:
            prefix.append(f"entity {self.entity_id}")
        if self.component is not None:
            prefix.append(f"component {self.component}")
        if prefix:
            return f"[{', '.join(prefix)}] {self.message}"
        return self.message


class ConfigurationError(MarkersError):
    exit_code = 1
    kind = 'configuration_error'

    def __init__(self, message, *, errors=None, **context):
        super().__init__(message, **context)
        self.errors = errors or {}

    def as_record(self):
        record = super().as_record()
        if self.errors:
            record['fields'] = self.errors
        return record


class UsageError(ConfigurationError):
    kind = 'usage_error'


class DataError(MarkersError):
    exit_code = 2
    kind = 'data_error'


class ParseError(DataError):
    kind = 'parse_error'

    def __init__(self, message, *, line=None, **context):
        super().__init__(message, **context)
        self.line = line

    def as_record(self):
        record = super().as_record()
        record['line'] = self.line
        return record


class AnalysisError(MarkersError):
    exit_code = 3
    kind = 'analysis_error'


class DegenerateError(AnalysisError):
    kind = 'degenerate'
