"""Self-describing model files.

Layout: one ASCII magic line with the format version, one line with the
header byte length, a JSON header (model kind, layer descriptions,
training metadata, and per-tensor byte offsets), then a binary block of
little-endian 64-bit floats. The header is human-auditable with `head`;
the parameter block round-trips bit-exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .autoencoder import CorruptionSpec, DenoisingAutoencoder
from .errors import DataFormatError
from .nn import ActivationKind, DenseLayer
from .sda import SupervisedNet

MAGIC = b"sdanet-model 1"
DTYPE = "<f8"


def _pack(kind: str, header_extra: dict, tensors: list[tuple[str, np.ndarray]]) -> bytes:
    index = []
    offset = 0
    blobs = []
    for name, arr in tensors:
        blob = np.ascontiguousarray(arr, dtype=np.float64).astype(DTYPE).tobytes()
        index.append(
            {"name": name, "shape": list(arr.shape), "offset": offset, "nbytes": len(blob)}
        )
        blobs.append(blob)
        offset += len(blob)
    header = {"kind": kind, **header_extra, "tensors": index}
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    return b"".join(
        [MAGIC, b"\n", str(len(header_bytes)).encode(), b"\n", header_bytes, *blobs]
    )


def _unpack(raw: bytes):
    nl = raw.find(b"\n")
    if nl < 0 or raw[:nl] != MAGIC:
        raise DataFormatError(
            f"not a model file: expected magic {MAGIC.decode()!r}, found {raw[:nl][:40]!r}"
        )
    nl2 = raw.find(b"\n", nl + 1)
    try:
        header_len = int(raw[nl + 1 : nl2])
    except (ValueError, TypeError):
        raise DataFormatError("model file header length line is unreadable") from None
    header_start = nl2 + 1
    try:
        header = json.loads(raw[header_start : header_start + header_len])
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"model file header is not valid JSON: {exc}") from None
    block = raw[header_start + header_len :]
    tensors = {}
    for entry in header["tensors"]:
        chunk = block[entry["offset"] : entry["offset"] + entry["nbytes"]]
        if len(chunk) != entry["nbytes"]:
            raise DataFormatError(
                f"tensor '{entry['name']}' is truncated: "
                f"{len(chunk)} of {entry['nbytes']} bytes present"
            )
        arr = np.frombuffer(chunk, dtype=DTYPE).reshape(entry["shape"]).copy()
        tensors[entry["name"]] = arr
    return header, tensors


def save_da_stack(path, das: list[DenoisingAutoencoder], metadata: dict | None = None) -> None:
    layers = []
    tensors = []
    for k, da in enumerate(das):
        layers.append(
            {
                "n_visible": da.n_visible,
                "n_hidden": da.n_hidden,
                "encoder_activation": da.encoder.activation.value,
                "decoder_activation": da.decoder_activation.value,
                "corruption_level": da.corruption.level,
                "corruption_seed": da.corruption.seed,
            }
        )
        tensors.append((f"da{k}.weights", da.encoder.weights))
        tensors.append((f"da{k}.bias", da.encoder.bias))
        tensors.append((f"da{k}.decoder_bias", da.decoder_bias))
    payload = _pack("da_stack", {"layers": layers, "metadata": metadata or {}}, tensors)
    Path(path).write_bytes(payload)


def save_net(path, net: SupervisedNet, metadata: dict | None = None) -> None:
    layers = [
        {"n_in": l.in_dim, "n_out": l.out_dim, "activation": l.activation.value}
        for l in net.layers
    ]
    tensors = []
    for i, layer in enumerate(net.layers):
        tensors.append((f"layer{i}.weights", layer.weights))
        tensors.append((f"layer{i}.bias", layer.bias))
    payload = _pack("supervised_net", {"layers": layers, "metadata": metadata or {}}, tensors)
    Path(path).write_bytes(payload)


def load_model(path):
    """Load any model file. Returns (kind, model, metadata) where model
    is a DenoisingAutoencoder list or a SupervisedNet."""
    header, tensors = _unpack(Path(path).read_bytes())
    kind = header.get("kind")
    metadata = header.get("metadata", {})
    if kind == "da_stack":
        das = []
        for k, desc in enumerate(header["layers"]):
            encoder = DenseLayer(
                tensors[f"da{k}.weights"],
                tensors[f"da{k}.bias"],
                ActivationKind.parse(desc["encoder_activation"]),
            )
            das.append(
                DenoisingAutoencoder(
                    encoder,
                    tensors[f"da{k}.decoder_bias"],
                    ActivationKind.parse(desc["decoder_activation"]),
                    CorruptionSpec(desc["corruption_level"], desc["corruption_seed"]),
                )
            )
        return kind, das, metadata
    if kind == "supervised_net":
        layers = [
            DenseLayer(
                tensors[f"layer{i}.weights"],
                tensors[f"layer{i}.bias"],
                ActivationKind.parse(desc["activation"]),
            )
            for i, desc in enumerate(header["layers"])
        ]
        return kind, SupervisedNet(layers), metadata
    raise DataFormatError(f"unknown model kind {kind!r}")


def load_da_stack(path) -> tuple[list[DenoisingAutoencoder], dict]:
    kind, model, metadata = load_model(path)
    if kind != "da_stack":
        raise DataFormatError(f"expected a da_stack model file, found {kind!r}")
    return model, metadata


def load_net(path) -> tuple[SupervisedNet, dict]:
    kind, model, metadata = load_model(path)
    if kind != "supervised_net":
        raise DataFormatError(f"expected a supervised_net model file, found {kind!r}")
    return model, metadata
