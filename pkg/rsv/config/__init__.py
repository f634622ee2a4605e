from .model_file import ModelFile, ModelFileError, load_model, parse_model
from .run_config import OutputFormat, RunConfig, RunConfigError
