"""Character-level trie with per-node candidate lists.

Used for lexicons, the query-log trie and the atom trie. Items are attached
at the node of their full key; each node can additionally carry a frozen
top-list of all items in its subtree, pre-sorted by a caller-supplied
priority, so prefix queries return ranked candidates without walking the
subtree online.
"""

from __future__ import annotations

from typing import Any, Callable, Iterator, Optional


class _Node:
    __slots__ = ("children", "items", "top")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.items: list[Any] = []
        self.top: Optional[list[Any]] = None


class Trie:
    def __init__(self):
        self.root = _Node()
        self.size = 0

    def insert(self, key: str, item: Any) -> None:
        node = self.root
        for ch in key:
            nxt = node.children.get(ch)
            if nxt is None:
                nxt = _Node()
                node.children[ch] = nxt
            node = nxt
        node.items.append(item)
        self.size += 1

    def node(self, prefix: str) -> Optional[_Node]:
        node = self.root
        for ch in prefix:
            node = node.children.get(ch)
            if node is None:
                return None
        return node

    def walk(self, prefix: str) -> int:
        """Number of leading characters of ``prefix`` that can be matched."""
        node = self.root
        n = 0
        for ch in prefix:
            node = node.children.get(ch)
            if node is None:
                return n
            n += 1
        return n

    def exact(self, key: str) -> list[Any]:
        node = self.node(key)
        return list(node.items) if node else []

    def freeze(self, sort_key: Callable[[Any], Any], cap: Optional[int] = None) -> None:
        """Precompute per-node candidate lists sorted by ``sort_key`` (ascending).

        ``cap`` bounds the length of each stored list. Iterative post-order so
        deep tries don't hit the recursion limit.
        """
        stack: list[tuple[_Node, bool]] = [(self.root, False)]
        while stack:
            node, done = stack.pop()
            if not done:
                stack.append((node, True))
                for child in node.children.values():
                    stack.append((child, False))
            else:
                merged = list(node.items)
                for child in node.children.values():
                    merged.extend(child.top or [])
                merged.sort(key=sort_key)
                if cap is not None:
                    merged = merged[:cap]
                node.top = merged

    def candidates(self, prefix: str, limit: Optional[int] = None) -> list[Any]:
        """Ranked items whose key starts with ``prefix`` (requires freeze)."""
        node = self.node(prefix)
        if node is None:
            return []
        if node.top is None:
            out = list(self.iter_below(node))
            return out if limit is None else out[:limit]
        return node.top if limit is None else node.top[:limit]

    def iter_below(self, node: _Node) -> Iterator[Any]:
        stack = [node]
        while stack:
            n = stack.pop()
            yield from n.items
            stack.extend(n.children.values())

    def count_below(self, prefix: str) -> int:
        node = self.node(prefix)
        if node is None:
            return 0
        if node.top is not None:
            # top may be capped; fall through to a walk only when capped
            total = sum(1 for _ in self.iter_below(node))
            return total
        return sum(1 for _ in self.iter_below(node))
