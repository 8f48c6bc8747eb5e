"""Timing comparison: compiled scan kernel vs the pure-Python twin.

Builds a corpus of positions by random playout, then drives both backends
through identical move-generation / capture-resolution / move-application
workloads. Checksums are compared first, so the run doubles as a
cross-validation of the two implementations.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --playouts 60 --repeats 7
"""

from __future__ import annotations

import argparse
import random
import time

from othello_arena import _kernel_py
from othello_arena import stages

try:
    from othello_arena import _kernel
except ImportError:
    _kernel = None

CORPUS_STAGES = ("stage-0", "stage-6x6", "stage-occlusion", "stage-c-squares")


def build_corpus(playouts: int, seed: int) -> list:
    """Positions (cells, size, ignore_occlusion) sampled from random games.

    Playouts run on the pure backend so the corpus is identical whether or
    not the extension is importable.
    """
    rng = random.Random(seed)
    corpus = []
    for index in range(playouts):
        stage = stages.get_stage(CORPUS_STAGES[index % len(CORPUS_STAGES)])
        size = stage.board_size
        occlusion = stage.rules.ignore_occlusion
        cells = stages.initial_board(stage).cells
        player = stage.start_player
        passes = 0
        while passes < 2:
            moves = _kernel_py.valid_moves(cells, size, player, occlusion)
            if moves:
                passes = 0
                flat = rng.choice(moves)
                cells, _ = _kernel_py.apply_move_cells(
                    cells, size, player, flat // size, flat % size, occlusion
                )
                corpus.append((cells, size, occlusion))
            else:
                passes += 1
            player = 3 - player
    return corpus


def workload(impl, corpus) -> int:
    """Full kernel sweep over the corpus; the checksum keeps the loop live."""
    checksum = 0
    for cells, size, occlusion in corpus:
        for player in (1, 2):
            moves = impl.valid_moves(cells, size, player, occlusion)
            checksum += len(moves)
            if not impl.has_any_move(cells, size, player, occlusion):
                continue
            checksum += impl.mobility(cells, size, player, occlusion)
            for flat in moves:
                row, col = divmod(flat, size)
                checksum += len(impl.find_flips(cells, size, player, row, col, occlusion))
                after, flipped = impl.apply_move_cells(cells, size, player, row, col, occlusion)
                checksum += flipped + after[flat]
        black, white, _, _ = impl.count_cells(cells, size)
        checksum += black - white
    return checksum


def best_time(impl, corpus, repeats: int) -> float:
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        workload(impl, corpus)
        timings.append(time.perf_counter() - start)
    return min(timings)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--playouts", type=int, default=24, help="random games in the corpus")
    parser.add_argument("--repeats", type=int, default=5, help="timed repetitions, best kept")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    corpus = build_corpus(args.playouts, args.seed)
    print(f"corpus: {len(corpus)} positions from {args.playouts} playouts")

    pure_sum = workload(_kernel_py, corpus)
    if _kernel is None:
        print("compiled extension not importable; timing the pure backend only")
        pure = best_time(_kernel_py, corpus, args.repeats)
        print(f"pure-python : {pure * 1000:8.2f} ms")
        return 0

    compiled_sum = workload(_kernel, corpus)
    if compiled_sum != pure_sum:
        print(f"BACKEND MISMATCH: compiled checksum {compiled_sum} != pure {pure_sum}")
        return 1
    print(f"checksums agree ({pure_sum})")

    compiled = best_time(_kernel, corpus, args.repeats)
    pure = best_time(_kernel_py, corpus, args.repeats)
    print(f"compiled    : {compiled * 1000:8.2f} ms")
    print(f"pure-python : {pure * 1000:8.2f} ms")
    print(f"speedup     : {pure / compiled:8.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
