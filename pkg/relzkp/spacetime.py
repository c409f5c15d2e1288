import logging
import math

from dataclasses import asdict, dataclass, field

import numpy as np
import portion

from cerberus import Validator
from sortedcontainers import SortedKeyList

from relzkp.errors import ConfigError, InvalidParameter, ProtocolViolation

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT_M_S = 299792458

# Roles taking part in a round
V1, P1, P2, V2 = "V1", "P1", "P2", "V2"
VERIFIERS = (V1, V2)

# Events of a round; the four timestamps are observed at the verifiers
V1_TRIGGER = "v1_trigger"
QUERY_RECEIVED = "query_received"
COMMIT_SENT = "commit_sent"
COMMIT_RECEIVED = "commit_received"
V2_TRIGGER = "v2_trigger"
CHALLENGE_RECEIVED = "challenge_received"
REVEAL_SENT = "reveal_sent"
REVEAL_RECEIVED = "reveal_received"

EVENT_ROLES = {
    V1_TRIGGER: V1,
    QUERY_RECEIVED: P1,
    COMMIT_SENT: P1,
    COMMIT_RECEIVED: V1,
    V2_TRIGGER: V2,
    CHALLENGE_RECEIVED: P2,
    REVEAL_SENT: P2,
    REVEAL_RECEIVED: V2,
}

# Schema of a spacetime profile
profile_schema = {
    "distance_m": {"type": "number", "min": 0},
    "tau_ns": {"type": "number", "min": 0, "nullable": True},
    "clock_skew_ns": {"type": "number", "min": 0},
    "link_latency_ns": {"type": "number", "min": 0},
    "link_latency_v1_ns": {"type": "number", "min": 0, "nullable": True},
    "link_latency_v2_ns": {"type": "number", "min": 0, "nullable": True},
    "trigger_offset_ns": {"type": "number"},
    "compute_ns": {"type": "number", "min": 0},
    "jitter_sd_ns": {"type": "number", "min": 0},
    "jitter_bound_ns": {"type": "number", "min": 0},
    "trigger_interval_ns": {"type": "number", "min": 0},
}

# Named profiles. "deployment" reproduces the 300 m deployment: the one-way link
# latencies are the halves of the mean round trips minus the prover clock
# cycle, and the per-hop jitter gives the measured spread of the differences.
PROFILES = {
    "deployment": {
        "distance_m": 300.0,
        "tau_ns": None,
        "clock_skew_ns": 30.0,
        "link_latency_ns": 300.0,
        "link_latency_v1_ns": 334.95,
        "link_latency_v2_ns": 350.81,
        "trigger_offset_ns": 0.0,
        "compute_ns": 6.4,
        "jitter_sd_ns": 8.0,
        "jitter_bound_ns": 55.0,
        "trigger_interval_ns": 1000.0,
    },
    "zero": {
        "distance_m": 300.0,
        "tau_ns": None,
        "clock_skew_ns": 0.0,
        "link_latency_ns": 0.0,
        "trigger_offset_ns": 0.0,
        "compute_ns": 6.4,
        "jitter_sd_ns": 0.0,
        "jitter_bound_ns": 0.0,
        "trigger_interval_ns": 1000.0,
    },
    # Socket runs on one host: no relativistic guarantee, one second window
    "loopback": {
        "distance_m": 300.0,
        "tau_ns": 1e9,
        "clock_skew_ns": 0.0,
        "link_latency_ns": 0.0,
        "trigger_offset_ns": 0.0,
        "compute_ns": 0.0,
        "jitter_sd_ns": 0.0,
        "jitter_bound_ns": 0.0,
        "trigger_interval_ns": 1000.0,
    },
}

# Alias of the deployment profile
PROFILES["paper"] = PROFILES["deployment"]


def light_delay_ns(distance_m):
    """Exact light travel time over distance_m"""
    return distance_m / SPEED_OF_LIGHT_M_S * 1e9


@dataclass(frozen=True)
class SpacetimeConfig:
    """Geometry, clocks and latencies of the two verifier-prover pairs

    Attributes:
        distance_m: d, the prover separation
        tau_ns: the timing threshold, floor(d/c) when not given
        clock_skew_ns: Delta, the bound on each verifier clock error
        link_latency_ns: one-way verifier-prover delay of both pairs
        link_latency_v1_ns: override of the V1-P1 delay
        link_latency_v2_ns: override of the V2-P2 delay
        trigger_offset_ns: V2 trigger time relative to V1
        compute_ns: prover response time
        jitter_sd_ns: standard deviation of the per-hop delay noise
        jitter_bound_ns: per-hop noise is clipped to this magnitude
        trigger_interval_ns: time between two rounds
        name: profile name
    """

    distance_m: float = 300.0
    tau_ns: float = None
    clock_skew_ns: float = 30.0
    link_latency_ns: float = 300.0
    link_latency_v1_ns: float = None
    link_latency_v2_ns: float = None
    trigger_offset_ns: float = 0.0
    compute_ns: float = 6.4
    jitter_sd_ns: float = 0.0
    jitter_bound_ns: float = 0.0
    trigger_interval_ns: float = 1000.0
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if self.tau_ns is None:
            object.__setattr__(self, "tau_ns", float(math.floor(light_delay_ns(self.distance_m))))
        for attr in (
            "distance_m",
            "tau_ns",
            "clock_skew_ns",
            "link_latency_ns",
            "compute_ns",
            "jitter_sd_ns",
            "jitter_bound_ns",
            "trigger_interval_ns",
        ):
            if getattr(self, attr) < 0:
                raise InvalidParameter(f"{attr} must be non negative")
        for attr in ("link_latency_v1_ns", "link_latency_v2_ns"):
            value = getattr(self, attr)
            if value is not None and value < 0:
                raise InvalidParameter(f"{attr} must be non negative")

    @classmethod
    def from_profile(cls, name, overrides=None, extra_profiles=None):
        """Build a configuration from a named profile

        Args:
            name: one of PROFILES or of extra_profiles
            overrides: values replacing the profile ones
            extra_profiles: additional profiles, e.g. from a profile file

        Returns:
            a SpacetimeConfig
        """
        profiles = dict(PROFILES)
        profiles.update(extra_profiles or {})
        if name not in profiles:
            raise ConfigError(f"Unknown spacetime profile {name}, choose one of {sorted(profiles)}")

        values = dict(profiles[name])
        values.update(overrides or {})
        validator = Validator()
        if not validator.validate(values, profile_schema):
            raise ConfigError(f"Invalid spacetime profile {name}: {validator.errors}")
        return cls(name=name, **values)

    def to_dict(self):
        return asdict(self)

    @property
    def latency_v1_ns(self):
        if self.link_latency_v1_ns is None:
            return self.link_latency_ns
        return self.link_latency_v1_ns

    @property
    def latency_v2_ns(self):
        if self.link_latency_v2_ns is None:
            return self.link_latency_ns
        return self.link_latency_v2_ns

    @property
    def cross_delay_ns(self):
        """Exact d/c, the fastest possible P1-P2 signal"""
        return light_delay_ns(self.distance_m)


@dataclass(frozen=True)
class ClockModel:
    """Clock errors of the verifiers for one run

    Provers do not timestamp anything and keep a zero error.

    Attributes:
        skews: map from role to clock error in ns
    """

    skews: dict = field(default_factory=dict)

    @classmethod
    def draw(cls, config, rng):
        """One uniform error in [-Delta, Delta] per verifier"""
        delta = config.clock_skew_ns
        return cls({role: rng.uniform(-delta, delta) if delta else 0.0 for role in VERIFIERS})

    def skew(self, role):
        return self.skews.get(role, 0.0)

    def observe(self, role, true_time_ns):
        return true_time_ns + self.skew(role)


@dataclass(frozen=True)
class EventRecord:
    event: str
    role: str
    true_time_ns: float
    observed_time_ns: float


class EventLog:
    """Events of a round ordered by true time"""

    def __init__(self, clock):
        self.clock = clock
        self.records = SortedKeyList(key=lambda r: r.true_time_ns)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def add(self, event, role, true_time_ns):
        record = EventRecord(event, role, true_time_ns, self.clock.observe(role, true_time_ns))
        self.records.add(record)
        return record

    def get(self, event):
        for record in self.records:
            if record.event == event:
                return record
        raise KeyError(event)

    def by_role(self, role):
        return [r for r in self.records if r.role == role]

    def audit(self, delta):
        """Check that every observation equals true time plus its role skew

        Returns:
            list of records breaking the rule, empty when consistent
        """
        bad = []
        for r in self.records:
            skew = self.clock.skew(r.role)
            if abs(skew) > delta or not math.isclose(
                r.observed_time_ns - r.true_time_ns, skew, abs_tol=1e-6
            ):
                bad.append(r)
        return bad


@dataclass(frozen=True)
class CrossProverMessage:
    """A signal between the provers, traveling at the speed of light

    Attributes:
        sender: P1 or P2
        receiver: the other prover
        name: event name of its arrival
        sent_after: events that must have happened before it is sent
        blocks: "commit" or "reveal" when the receiver waits for it to answer
    """

    sender: str
    receiver: str
    name: str
    sent_after: tuple = ()
    blocks: str = None

    def __post_init__(self):
        if {self.sender, self.receiver} != {P1, P2}:
            raise InvalidParameter("Cross prover messages go between P1 and P2")
        if self.blocks not in (None, "commit", "reveal"):
            raise InvalidParameter(f"Unknown blocked phase {self.blocks}")


@dataclass(frozen=True)
class RoundTiming:
    """Observed timestamps of one round

    Attributes:
        t1: query sent, V1 clock
        t2: commitment received, V1 clock
        t3: challenge sent, V2 clock
        t4: reveal received, V2 clock
        log: the EventLog, when recorded
    """

    t1: float
    t2: float
    t3: float
    t4: float
    log: EventLog = field(default=None, compare=False, repr=False)

    @property
    def query_reveal_ns(self):
        return abs(self.t1 - self.t4)

    @property
    def commit_challenge_ns(self):
        return abs(self.t2 - self.t3)


def _hop_jitter(config, rng):
    # Four hops: V1->P1, P1->V1, V2->P2, P2->V2
    if not config.jitter_sd_ns:
        return np.zeros(4)
    noise = rng.normal(0.0, config.jitter_sd_ns, size=4)
    bound = config.jitter_bound_ns
    if bound:
        noise = np.clip(noise, -bound, bound)
    return noise


def simulate_round_timing(config, clock, rng, adversary_comm=None, record_log=True):
    """Compute the four observed timestamps of one round

    V1 fires the query at 0 and V2 the challenge at trigger_offset_ns. Every
    verifier-prover hop costs the link latency plus clipped noise, every prover
    answer costs compute_ns. A cross prover message leaves once all its
    `sent_after` events happened, after one compute step, and takes d/c; a
    prover blocked on messages answers only when all of them arrived.

    Args:
        config: the SpacetimeConfig
        clock: the ClockModel of the run
        rng: SeededRng of this round
        adversary_comm: list of CrossProverMessage
        record_log: build the EventLog

    Returns:
        a RoundTiming
    """
    messages = list(adversary_comm or ())
    by_name = {m.name: m for m in messages}
    if len(by_name) != len(messages):
        raise ProtocolViolation("Cross prover messages need distinct names")
    jitter = _hop_jitter(config, rng)
    hop = [
        max(0.0, config.latency_v1_ns + jitter[0]),
        max(0.0, config.latency_v1_ns + jitter[1]),
        max(0.0, config.latency_v2_ns + jitter[2]),
        max(0.0, config.latency_v2_ns + jitter[3]),
    ]

    times = {
        V1_TRIGGER: 0.0,
        V2_TRIGGER: float(config.trigger_offset_ns),
    }
    times[QUERY_RECEIVED] = times[V1_TRIGGER] + hop[0]
    times[CHALLENGE_RECEIVED] = times[V2_TRIGGER] + hop[2]
    resolving = set()

    def resolve(event):
        if event in times:
            return times[event]
        if event in resolving:
            raise ProtocolViolation(f"Cross prover messages wait on each other at {event}")
        resolving.add(event)

        if event in (COMMIT_SENT, REVEAL_SENT):
            phase = "commit" if event == COMMIT_SENT else "reveal"
            ready = QUERY_RECEIVED if phase == "commit" else CHALLENGE_RECEIVED
            waits = [resolve(m.name) for m in messages if m.blocks == phase]
            value = max([times[ready]] + waits) + config.compute_ns
        elif event == COMMIT_RECEIVED:
            value = resolve(COMMIT_SENT) + hop[1]
        elif event == REVEAL_RECEIVED:
            value = resolve(REVEAL_SENT) + hop[3]
        elif event in by_name:
            message = by_name[event]
            start = max((resolve(e) for e in message.sent_after), default=0.0)
            value = start + config.compute_ns + config.cross_delay_ns
        else:
            raise ProtocolViolation(f"Unknown event {event}")

        resolving.discard(event)
        times[event] = value
        return value

    for message in messages:
        resolve(message.name)
    for event in (COMMIT_RECEIVED, REVEAL_RECEIVED):
        resolve(event)

    log = None
    if record_log:
        log = EventLog(clock)
        for event, value in times.items():
            role = EVENT_ROLES.get(event) or by_name[event].receiver
            log.add(event, role, value)

    return RoundTiming(
        t1=clock.observe(V1, times[V1_TRIGGER]),
        t2=clock.observe(V1, times[COMMIT_RECEIVED]),
        t3=clock.observe(V2, times[V2_TRIGGER]),
        t4=clock.observe(V2, times[REVEAL_RECEIVED]),
        log=log,
    )


def relay_messages():
    """P2 forwards the challenge to P1, P1 answers with the keys

    The reveal waits for the keys, which depend on the query, so V2 cannot
    receive it before the query left V1 plus d/c.
    """
    return [
        CrossProverMessage(P2, P1, "challenge_at_p1", (CHALLENGE_RECEIVED,)),
        CrossProverMessage(P1, P2, "keys_at_p2", (QUERY_RECEIVED, "challenge_at_p1"), "reveal"),
    ]


def acceptance_window(tau_ns):
    """Open interval (-tau, tau) of admissible time differences"""
    return portion.open(-tau_ns, tau_ns)


def timing_check(t1, t2, t3, t4, tau_ns, skew_ns=0.0, worst_case=False):
    """Relativistic timing verdict of a round

    Both |t1 - t4| and |t2 - t3| must lie strictly below tau. With worst_case
    each difference is first widened by 2 Delta, the largest error two
    verifier clocks can add together.

    Returns:
        True when both differences pass
    """
    window = acceptance_window(tau_ns)
    margin = 2 * skew_ns if worst_case else 0.0
    return (abs(t1 - t4) + margin) in window and (abs(t2 - t3) + margin) in window


def timing_summary(samples):
    """Max, min, mean, median and standard deviation of time differences

    Args:
        samples: iterable of values in ns

    Returns:
        dict of statistics
    """
    values = np.asarray(list(samples), dtype=float)
    if values.size == 0:
        raise InvalidParameter("No samples to summarize")
    return {
        "max": float(values.max()),
        "min": float(values.min()),
        "mean": float(values.mean()),
        "median": float(np.median(values)),
        "sd": float(values.std(ddof=1)) if values.size > 1 else 0.0,
        "count": int(values.size),
    }
