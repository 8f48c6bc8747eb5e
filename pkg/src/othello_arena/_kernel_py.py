"""Pure-Python scan kernels: capture resolution and move generation.

Mirrors the compiled extension in ``_kernel.pyx`` exactly; boards are flat
``bytes`` of length size*size, row-major, with cell values 0 empty, 1 black,
2 white, 3 blocked.
"""

from __future__ import annotations

EMPTY = 0
BLACK = 1
WHITE = 2
BLOCKED = 3

_DIRECTIONS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def find_flips(cells, size, player, row, col, ignore_occlusion):
    """Flat indices flipped by placing `player` at (row, col), ascending.

    Empty result means the placement captures nothing. The target cell must
    be empty and in bounds; callers validate that.
    """
    if cells[row * size + col] != EMPTY:
        return []
    opponent = 3 - player
    flips = []
    for dr, dc in _DIRECTIONS:
        r = row + dr
        c = col + dc
        line = []
        while 0 <= r < size and 0 <= c < size:
            cell = cells[r * size + c]
            if cell == opponent:
                line.append(r * size + c)
            elif cell == BLOCKED:
                # Blocked breaks the line unless occlusion is ignored,
                # in which case it is skipped without being accumulated.
                if not ignore_occlusion:
                    line = []
                    break
            elif cell == player:
                if line:
                    flips.extend(line)
                break
            else:
                break
            r += dr
            c += dc
    flips.sort()
    return flips


def valid_moves(cells, size, player, ignore_occlusion):
    """Flat indices of all legal placements for `player`, ascending."""
    moves = []
    for idx in range(size * size):
        if cells[idx] == EMPTY and find_flips(cells, size, player, idx // size, idx % size, ignore_occlusion):
            moves.append(idx)
    return moves


def has_any_move(cells, size, player, ignore_occlusion):
    for idx in range(size * size):
        if cells[idx] == EMPTY and find_flips(cells, size, player, idx // size, idx % size, ignore_occlusion):
            return True
    return False


def mobility(cells, size, player, ignore_occlusion):
    count = 0
    for idx in range(size * size):
        if cells[idx] == EMPTY and find_flips(cells, size, player, idx // size, idx % size, ignore_occlusion):
            count += 1
    return count


def apply_move_cells(cells, size, player, row, col, ignore_occlusion):
    """New cells and captured count for a placement, or None if illegal."""
    flips = find_flips(cells, size, player, row, col, ignore_occlusion)
    if not flips:
        return None
    out = bytearray(cells)
    out[row * size + col] = player
    for idx in flips:
        out[idx] = player
    return bytes(out), len(flips)


def count_cells(cells, size):
    """Counts as a (black, white, empty, blocked) tuple."""
    black = white = empty = blocked = 0
    for cell in cells:
        if cell == BLACK:
            black += 1
        elif cell == WHITE:
            white += 1
        elif cell == EMPTY:
            empty += 1
        else:
            blocked += 1
    return black, white, empty, blocked
