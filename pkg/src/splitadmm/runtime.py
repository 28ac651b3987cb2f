"""In-process simulation of a synchronous multi-node runtime.

Nodes exchange numpy vectors through a :class:`Network`, which delivers
read-only copies into per-node mailboxes and meters every transfer in a
:class:`~splitadmm.comm.CommLedger`. Work inside a phase may run on a thread
pool; phases are separated by barriers (``run_phase`` returns only after all
tasks finish). Nodes read mailboxes sorted by sender, so results never depend
on scheduling.
"""

import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .comm import CommLedger

__all__ = ['Network', 'Scheduler']


class Network:
    """Metered point-to-point and broadcast delivery between named nodes."""

    def __init__(self, ledger=None):
        self.ledger = ledger if ledger is not None else CommLedger()
        self.iteration = 0
        self._order = {}
        self._mail = {}
        self._lock = threading.Lock()

    def add_node(self, name, role):
        self.ledger.add_node(name, role)
        self._order[name] = len(self._order)
        self._mail[name] = {}

    def _payload(self, data):
        data = np.array(data, dtype=np.complex128, copy=True)
        data.setflags(write=False)
        return data

    def _deliver(self, src, dst, tag, data):
        if dst not in self._mail:
            raise KeyError(f"unknown destination {dst!r}")
        with self._lock:
            box = self._mail[dst].setdefault(tag, {})
            if src in box:
                raise RuntimeError(
                    f"{dst!r} has an unread {tag!r} message from {src!r}")
            box[src] = data
        self.ledger.record_receive(dst, self.iteration, data.size)

    def send(self, src, dst, tag, data):
        data = self._payload(data)
        self.ledger.record_send(src, self.iteration, data.size, links=1)
        self._deliver(src, dst, tag, data)

    def broadcast(self, src, dsts, tag, data):
        """Send one payload to every node in `dsts` (possibly none).

        The sender is charged the payload size once; the per-link count
        charges it once per recipient.
        """
        data = self._payload(data)
        dsts = list(dsts)
        self.ledger.record_send(src, self.iteration, data.size,
                                links=len(dsts))
        for dst in dsts:
            self._deliver(src, dst, tag, data)

    def receive(self, dst, tag):
        """Pop all `tag` messages for `dst` as a list of ``(src, data)``.

        Messages are ordered by sender registration order.
        """
        with self._lock:
            box = self._mail[dst].pop(tag, {})
        return sorted(box.items(), key=lambda item: self._order[item[0]])

    def receive_one(self, dst, tag, src):
        msgs = dict(self.receive(dst, tag))
        if list(msgs) != [src]:
            raise RuntimeError(
                f"{dst!r} expected one {tag!r} message from {src!r}, got "
                f"{sorted(msgs)}")
        return msgs[src]


class Scheduler:
    """Runs the tasks of one phase sequentially or on a thread pool."""

    def __init__(self, threads=1):
        self.threads = max(1, int(threads))
        self._pool = (ThreadPoolExecutor(self.threads)
                      if self.threads > 1 else None)

    def run_phase(self, fn, items):
        if self._pool is None:
            for item in items:
                fn(item)
            return
        # list() propagates the first worker exception
        list(self._pool.map(fn, items))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
