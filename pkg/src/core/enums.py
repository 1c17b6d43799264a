from enum import Enum


class StreamOrigin(Enum):
    MSC = "MSC"
    LSC = "LSC"
    KEYSTREAM = "keystream"
    WATERMARK = "watermark"


class EmbedMode(Enum):
    SUBSTITUTE = "substitute"
    NEGATE = "negate"


class CollisionPolicy(Enum):
    PROBE = "probe"
    OVERWRITE = "overwrite"


class AttackKind(Enum):
    ZEROING = "zeroing"
    ROTATION = "rotation"
    JPEG = "jpeg"
    GAUSSIAN = "gaussian"


class ZeroingAnchor(Enum):
    CENTER = "center"
    TOP_LEFT = "top-left"


class Interpolation(Enum):
    BILINEAR = "bilinear"
    NEAREST = "nearest"
