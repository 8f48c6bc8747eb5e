# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels: capture resolution and move generation.

Semantics are identical to the pure twin in ``_kernel_py.py``; boards are
flat ``bytes`` of length size*size, row-major, with cell values 0 empty,
1 black, 2 white, 3 blocked.
"""

cdef int EMPTY = 0
cdef int BLACK = 1
cdef int WHITE = 2
cdef int BLOCKED = 3

cdef int[8] DR = [-1, -1, -1, 0, 0, 1, 1, 1]
cdef int[8] DC = [-1, 0, 1, -1, 1, -1, 0, 1]


cdef int _scan_flips(const unsigned char[:] cells, int size, int player,
                     int row, int col, bint ignore_occlusion, int* out) nogil:
    """Writes flipped flat indices into `out`; returns the count (unsorted)."""
    cdef int opponent = 3 - player
    cdef int total = 0
    cdef int d, r, c, cell, line_start
    cdef bint keep
    if cells[row * size + col] != EMPTY:
        return 0
    for d in range(8):
        r = row + DR[d]
        c = col + DC[d]
        line_start = total
        keep = False
        while 0 <= r < size and 0 <= c < size:
            cell = cells[r * size + c]
            if cell == opponent:
                out[total] = r * size + c
                total += 1
            elif cell == BLOCKED:
                # Blocked breaks the line unless occlusion is ignored,
                # in which case it is skipped without being accumulated.
                if not ignore_occlusion:
                    break
            elif cell == player:
                keep = True
                break
            else:
                break
            r += DR[d]
            c += DC[d]
        if not keep:
            total = line_start
    return total


def find_flips(const unsigned char[:] cells, int size, int player,
               int row, int col, bint ignore_occlusion):
    """Flat indices flipped by placing `player` at (row, col), ascending."""
    cdef int buf[256]
    cdef int n = _scan_flips(cells, size, player, row, col, ignore_occlusion, buf)
    cdef int i
    result = [buf[i] for i in range(n)]
    result.sort()
    return result


def valid_moves(const unsigned char[:] cells, int size, int player, bint ignore_occlusion):
    """Flat indices of all legal placements for `player`, ascending."""
    cdef int buf[256]
    cdef int idx
    moves = []
    for idx in range(size * size):
        if cells[idx] == EMPTY:
            if _scan_flips(cells, size, player, idx / size, idx % size, ignore_occlusion, buf) > 0:
                moves.append(idx)
    return moves


def has_any_move(const unsigned char[:] cells, int size, int player, bint ignore_occlusion):
    cdef int buf[256]
    cdef int idx
    for idx in range(size * size):
        if cells[idx] == EMPTY:
            if _scan_flips(cells, size, player, idx / size, idx % size, ignore_occlusion, buf) > 0:
                return True
    return False


def mobility(const unsigned char[:] cells, int size, int player, bint ignore_occlusion):
    cdef int buf[256]
    cdef int idx, count = 0
    for idx in range(size * size):
        if cells[idx] == EMPTY:
            if _scan_flips(cells, size, player, idx / size, idx % size, ignore_occlusion, buf) > 0:
                count += 1
    return count


def apply_move_cells(const unsigned char[:] cells, int size, int player,
                     int row, int col, bint ignore_occlusion):
    """New cells and captured count for a placement, or None if illegal."""
    cdef int buf[256]
    cdef int n = _scan_flips(cells, size, player, row, col, ignore_occlusion, buf)
    cdef int i
    if n == 0:
        return None
    out = bytearray(cells)
    out[row * size + col] = player
    for i in range(n):
        out[buf[i]] = player
    return bytes(out), n


def count_cells(const unsigned char[:] cells, int size):
    """Counts as a (black, white, empty, blocked) tuple."""
    cdef int black = 0, white = 0, empty = 0, blocked = 0
    cdef int idx, cell
    for idx in range(size * size):
        cell = cells[idx]
        if cell == BLACK:
            black += 1
        elif cell == WHITE:
            white += 1
        elif cell == EMPTY:
            empty += 1
        else:
            blocked += 1
    return black, white, empty, blocked
