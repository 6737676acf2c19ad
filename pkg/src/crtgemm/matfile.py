"""OZ2M binary matrix files.

Layout: 4-byte magic "OZ2M", little-endian int64 rows, int64 cols, one
byte of dtype code (0=f32, 1=f64, 2=c32, 3=c64), then raw column-major
element data in little-endian order.
"""

import struct

import numpy as np

MAGIC = b"OZ2M"
_HEADER = struct.Struct("<qqB")

_CODE_TO_DTYPE = {0: "<f4", 1: "<f8", 2: "<c8", 3: "<c16"}
_KIND_TO_CODE = {"f4": 0, "f8": 1, "c8": 2, "c16": 3}


def dtype_code(dtype) -> int:
    key = np.dtype(dtype).str.lstrip("<>=|")
    if key not in _KIND_TO_CODE:
        raise ValueError(f"unsupported matrix dtype {dtype!r}; "
                         "use f32, f64, c32 or c64")
    return _KIND_TO_CODE[key]


def write_matrix(path, matrix: np.ndarray) -> None:
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ValueError("only 2-D matrices are supported")
    code = dtype_code(arr.dtype)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(arr.shape[0], arr.shape[1], code))
        fh.write(np.asfortranarray(arr).astype(_CODE_TO_DTYPE[code],
                                               copy=False).tobytes(order="F"))


def read_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"{path}: not an OZ2M matrix file")
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        rows, cols, code = _HEADER.unpack(header)
        if rows < 0 or cols < 0:
            raise ValueError(f"{path}: negative dimensions")
        if code not in _CODE_TO_DTYPE:
            raise ValueError(f"{path}: unknown dtype code {code}")
        dtype = np.dtype(_CODE_TO_DTYPE[code])
        payload = fh.read(rows * cols * dtype.itemsize)
        if len(payload) != rows * cols * dtype.itemsize:
            raise ValueError(f"{path}: truncated data section")
    flat = np.frombuffer(payload, dtype=dtype)
    return flat.reshape((rows, cols), order="F").astype(dtype.newbyteorder("="))
