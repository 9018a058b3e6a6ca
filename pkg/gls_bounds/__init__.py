from . import data_models, exceptions
from .models import (
    gls_calculus,
    history_storage,
    mc_verify,
    moment_engine,
    rv_models,
    storage,
    tail_engine,
)
from . import config, controller
