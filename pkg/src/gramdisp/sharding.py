"""Bounded shard-parallel map over worker processes."""
import logging
from concurrent.futures import FIRST_COMPLETED, Future, ProcessPoolExecutor, wait
from itertools import islice
from typing import Any, Callable, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def batched(items: Iterable[T], size: int) -> Iterator[List[T]]:
    """Splits an iterable into lists of at most `size` items."""
    if size < 1:
        raise ValueError(f"Batch size must be >= 1, got {size}")
    it = iter(items)
    while True:
        batch = list(islice(it, size))
        if not batch:
            return
        yield batch


def map_shards(
    fn: Callable[[Sequence[T]], R],
    shards: Iterable[Sequence[T]],
    workers: int = 1,
    initializer: Optional[Callable[..., Any]] = None,
    initargs: Tuple[Any, ...] = (),
    progress: bool = False,
    desc: str = "shards",
) -> Iterator[R]:
    """
    Applies `fn` to every shard and yields the results in completion order.

    With `workers > 1` shards go to a process pool; at most `2 * workers`
    shards are in flight so a large corpus is never fully materialized.
    Callers must combine results with an order-independent merge.

    `initializer(*initargs)` runs once per worker process (and once in-process
    for `workers == 1`), so large shared state is shipped once per worker.
    """
    bar = tqdm(desc=desc, unit="shard", disable=not progress)
    try:
        if workers <= 1:
            if initializer is not None:
                initializer(*initargs)
            for shard in shards:
                yield fn(shard)
                bar.update(1)
            return

        logger.info("Dispatching %s to %d worker processes", desc, workers)
        with ProcessPoolExecutor(max_workers=workers, initializer=initializer, initargs=initargs) as executor:
            pending: Set[Future] = set()
            source = iter(shards)
            exhausted = False
            while pending or not exhausted:
                while not exhausted and len(pending) < 2 * workers:
                    shard = next(source, None)
                    if shard is None:
                        exhausted = True
                        break
                    pending.add(executor.submit(fn, shard))
                if not pending:
                    break
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for future in done:
                    yield future.result()
                    bar.update(1)
    finally:
        bar.close()
