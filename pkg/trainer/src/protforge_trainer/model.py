"""Two-branch regression network.

A 1-d CNN digests the binned topological channels, a dense stack digests
the electrostatic moments, and a merged head emits one energy value.
Either branch can be dropped (length 0) for the single-feature ablations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .data import N_CHANNELS


@dataclass(frozen=True)
class NetworkSpec:
    conv_filters: tuple[int, ...] = (128, 64, 64)
    conv_activations: tuple[str, ...] = ("tanh", "relu", "tanh")
    kernel_width: int = 3
    pool_width: int = 2  # max pooling; the pooling type is an assumption
    cnn_dense_units: int = 64
    dense_branch_units: tuple[int, ...] = (128, 64)
    head_units: tuple[int, ...] = (32, 16, 8)
    dense_activation: str = "relu"
    # a single dropout right after the branch merge; per-layer dropout in
    # the narrow head injects output noise that stalls convergence on
    # small datasets
    dropout_rate: float = 0.2
    batch_norm: bool = True  # after each merged-head hidden layer

    def __post_init__(self):
        if len(self.conv_filters) != len(self.conv_activations):
            raise ValueError("one activation per convolution block required")


def build_model(spec: NetworkSpec, topo_len: int, electro_len: int):
    """Keras model taking (topo, electro) standardized inputs and emitting
    a single scalar.  topo_len == 0 or electro_len == 0 builds the
    corresponding single-branch ablation."""
    import tensorflow as tf
    from tensorflow.keras import layers

    if topo_len == 0 and electro_len == 0:
        raise ValueError("at least one input branch must be present")
    if topo_len and topo_len % N_CHANNELS != 0:
        raise ValueError(
            f"topo length {topo_len} does not split into {N_CHANNELS} channels"
        )

    inputs = []
    branches = []

    if topo_len:
        n_bins = topo_len // N_CHANNELS
        topo_in = layers.Input(shape=(n_bins, N_CHANNELS), name="topo")
        inputs.append(topo_in)
        x = topo_in
        for filters, activation in zip(spec.conv_filters, spec.conv_activations):
            x = layers.Conv1D(
                filters, spec.kernel_width, activation=activation
            )(x)
            x = layers.MaxPooling1D(spec.pool_width)(x)
        x = layers.Flatten()(x)
        x = layers.Dense(spec.cnn_dense_units, activation=spec.dense_activation)(x)
        branches.append(x)

    if electro_len:
        electro_in = layers.Input(shape=(electro_len,), name="electro")
        inputs.append(electro_in)
        x = electro_in
        for units in spec.dense_branch_units:
            x = layers.Dense(units, activation=spec.dense_activation)(x)
        branches.append(x)

    merged = layers.concatenate(branches) if len(branches) > 1 else branches[0]
    x = merged
    if spec.dropout_rate > 0:
        x = layers.Dropout(spec.dropout_rate)(x)
    for units in spec.head_units:
        x = layers.Dense(units, activation=spec.dense_activation)(x)
        if spec.batch_norm:
            x = layers.BatchNormalization()(x)
    output = layers.Dense(1, activation="linear", name="energy")(x)

    return tf.keras.Model(inputs=inputs, outputs=output)
