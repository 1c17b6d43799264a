from src.core.exceptions import DataFormatError


class NetpbmError(DataFormatError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class MalformedHeaderError(NetpbmError):
    pass


class MaxvalUnsupportedError(NetpbmError):
    pass


class TruncatedPayloadError(NetpbmError):
    pass


class MalformedPayloadError(NetpbmError):
    pass


class KeyFileError(DataFormatError):
    pass
