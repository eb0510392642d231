"""Little-endian binary IO helpers for the on-disk index files."""

from __future__ import annotations

import struct

from .errors import StorageError


def write_u8(buf: bytearray, value: int) -> None:
    buf += struct.pack("<B", value)


def write_u32(buf: bytearray, value: int) -> None:
    buf += struct.pack("<I", value)


def write_u64(buf: bytearray, value: int) -> None:
    buf += struct.pack("<Q", value)


def write_str(buf: bytearray, value: str) -> None:
    raw = value.encode("utf-8")
    write_u32(buf, len(raw))
    buf += raw


def write_uvarint(buf: bytearray, value: int) -> None:
    # LEB128, unsigned
    if value < 0:
        raise ValueError("uvarint cannot encode negative values")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            buf.append(byte | 0x80)
        else:
            buf.append(byte)
            return


class ByteReader:
    """Sequential reader over an immutable byte blob; raises StorageError on truncation."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def raw(self, n: int) -> bytes:
        end = self._pos + n
        if end > len(self._data):
            raise StorageError("truncated index file")
        out = self._data[self._pos:end]
        self._pos = end
        return out

    def u8(self) -> int:
        return struct.unpack("<B", self.raw(1))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.raw(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.raw(8))[0]

    def str(self) -> str:
        n = self.u32()
        return self.raw(n).decode("utf-8")

    def uvarint(self) -> int:
        shift = 0
        value = 0
        while True:
            byte = self.u8()
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7
            if shift > 63:
                raise StorageError("uvarint overflow in index file")

    def expect_eof(self) -> None:
        if self._pos != len(self._data):
            raise StorageError("trailing bytes in index file")
