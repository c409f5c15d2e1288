"""
Prover strategies played by the `relzkp` harness.

A run mode `honest` loads `generic`, a mode `cheat:<name>` loads the module
`<name>` of this package. Every module exports a `Strategy` class.

Modules exported by this package:

- `generic`: honest provers and the base classes of every strategy.
- `one_bad_edge`: fixed coloring with a single color flip that breaks the fewest edges.
- `random_invalid`: fresh improper coloring every round.
- `relay`: P2 forwards the challenge to P1 and waits for the keys.
- `equivocation`: P2 shifts a key to open a different color than P1 committed.
"""
