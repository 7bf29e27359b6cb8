from .lexical_errors import IndexBuildError, SamplingError

__all__ = ["IndexBuildError", "SamplingError"]
