"""Exception taxonomy: validation errors exit the CLI with code 2,
execution errors with code 3."""


class RuleaugError(Exception):
    pass


class ValidationError(RuleaugError):
    """Bad user input: schemas, CSVs, rule files, configs."""


class SchemaError(ValidationError):
    pass


class DatasetError(ValidationError):
    pass


class RuleError(ValidationError):
    pass


class RuleSyntaxError(RuleError):
    def __init__(self, message: str, line: int, column: int | None = None):
        loc = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{loc}: {message}")
        self.line = line
        self.column = column


class ConfigError(ValidationError):
    pass


class ExecutionError(RuleaugError):
    """Failure while running the augmentation loop or an experiment."""
