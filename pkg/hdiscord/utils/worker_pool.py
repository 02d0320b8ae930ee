"""
Ordered fan-out over a thread pool
"""

import concurrent.futures
import logging
from typing import Any, Callable, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

Outcome = Tuple[Optional[Any], Optional[Exception]]


def map_ordered(func: Callable[[Any], Any], items: Sequence[Any], workers: int = 1) -> List[Outcome]:
    """Run func over items and return (value, error) pairs in input order"""
    if workers <= 1 or len(items) <= 1:
        outcomes = []
        for item in items:
            try:
                outcomes.append((func(item), None))
            except Exception as e:
                outcomes.append((None, e))
        return outcomes

    results = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_index = {executor.submit(func, item): i for i, item in enumerate(items)}

        # Collect results as they complete
        for future in concurrent.futures.as_completed(future_to_index):
            index = future_to_index[future]
            try:
                results[index] = (future.result(), None)
            except Exception as e:
                logger.debug(f"Item {index} failed: {e}")
                results[index] = (None, e)

    # Restore submission order
    return [results[i] for i in range(len(items))]
