import logging

from relzkp.field import add, embed_color, mul, sample_uniform_nonzero
from relzkp.strategies.generic import ProverP2 as ProverP2Default
from relzkp.strategies.generic import Strategy as StrategyDefault

logger = logging.getLogger(__name__)


def third_color(c1, c2):
    return 3 - c1 - c2


class ProverP2(ProverP2Default):
    """Shifts the key of the first endpoint towards the third color

    Without x the shift guess * (target - color) only opens the target color
    when guess == x_i. One other x decodes to the color of the second
    endpoint, every other x decodes outside the colors.
    """

    def reveal(self, C):
        b_i, b_j = super(ProverP2, self).reveal(C)
        i, j = C
        pi = self.state.permutation
        committed = pi(self.state.coloring[i])
        target = third_color(committed, pi(self.state.coloring[j]))
        guess = sample_uniform_nonzero(self.private_rng(self.state.round_index), self.spec)
        shift = mul(guess, add(embed_color(target, self.spec), embed_color(committed, self.spec)))
        return add(b_i, shift), b_j


class Strategy(StrategyDefault):
    """P1 commits the witness honestly, P2 tries to open a different color"""

    name = "equivocation"

    P2 = ProverP2

    def expected_rates(self):
        """accept, monochrome and color_range probabilities per round"""
        others = self.spec.order - 1
        return {
            "accept": 1 / others,
            "monochrome": 1 / others,
            "color_range": (others - 2) / others,
        }
