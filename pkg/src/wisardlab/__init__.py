"""wisardlab: an interactive WiSARD weightless neural network laboratory.

The engine (core) trains RAM-neuron discriminators with access counters,
classifies with bleaching tie-breaks, and extracts mental-image
prototypes. imaging converts real images to binary retinas and back.
blockscript is a small teaching language with learning as ordinary
statements; service exposes the engine over HTTP; cli ties it together.
"""

from .core import (
    BinaryPattern,
    ClassificationOutcome,
    Discriminator,
    MentalImage,
    TupleMapping,
    WisardModel,
    address_of,
    deserialize_model,
    generate_mapping,
    new_model,
    serialize_model,
)
from .errors import (
    DimensionMismatchError,
    ModelFormatError,
    PgmError,
    UnknownLabelError,
    VersionMismatchError,
    WisardError,
)
from .imaging import (
    BinarizeConfig,
    GrayImage,
    binarize,
    load_labeled_dir,
    load_pgm,
    render_mental_image,
    write_pgm,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryPattern",
    "BinarizeConfig",
    "ClassificationOutcome",
    "DimensionMismatchError",
    "Discriminator",
    "GrayImage",
    "MentalImage",
    "ModelFormatError",
    "PgmError",
    "TupleMapping",
    "UnknownLabelError",
    "VersionMismatchError",
    "WisardError",
    "WisardModel",
    "address_of",
    "binarize",
    "deserialize_model",
    "generate_mapping",
    "load_labeled_dir",
    "load_pgm",
    "new_model",
    "render_mental_image",
    "serialize_model",
    "write_pgm",
]
