"""ReLU inference engine and exact network compilers for ENO machinery."""

from .builders import (
    build_eno3_explicit,
    build_eno4_explicit,
    build_eno_interp_net,
    build_eno_rec_net,
    interp_hidden_layer_count,
)
from .network import (
    DenseLayer,
    MlpNetwork,
    NetworkFormatError,
    agreement_rate,
    classify,
    forward,
    load_network,
    network_from_json,
    network_to_json,
    save_network,
    softmax,
)
from .srnet import (
    build_enosr_class_net,
    build_enosr_regression_net,
    enosr_regression_reference,
    h_eps,
    star,
)
from .trained import trained_deleno

__all__ = [
    "DenseLayer",
    "MlpNetwork",
    "NetworkFormatError",
    "agreement_rate",
    "build_eno3_explicit",
    "build_eno4_explicit",
    "build_eno_interp_net",
    "build_eno_rec_net",
    "build_enosr_class_net",
    "build_enosr_regression_net",
    "classify",
    "enosr_regression_reference",
    "forward",
    "h_eps",
    "interp_hidden_layer_count",
    "load_network",
    "network_from_json",
    "network_to_json",
    "save_network",
    "softmax",
    "star",
    "trained_deleno",
]
