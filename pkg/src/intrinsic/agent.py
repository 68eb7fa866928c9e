"""A minimal event-driven agent over the dissection stream.

The agent is just a position (volume-weighted entry price, signed gearing)
plus two fixed demonstration policies. Contrarian leans against overshoots:
it sells a unit into up-overshoots, buys a unit into down-overshoots, and
closes the whole position on every directional change. Trend-following is
the mirror image (trades with the overshoot direction, same close rule).
Pnl is in price units per unit of gearing; no spreads or costs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import Agent, DissectionConfig, Event, EventKind, Mode
from .dissect import dissect
from .errors import DataError
from .series import PriceSeries

__all__ = [
    "DirectionPolicy",
    "AgentRules",
    "Fill",
    "TrajectoryRecord",
    "AgentTrajectory",
    "on_event",
    "run_strategy",
]


class DirectionPolicy(Enum):
    CONTRARIAN = "contrarian"
    TREND_FOLLOWING = "trend-following"


@dataclass(frozen=True, slots=True)
class AgentRules:
    """Sizing and direction policy for the demo agent."""

    unit_gearing: float = 1.0
    max_gearing: float = 5.0
    direction_policy: DirectionPolicy = DirectionPolicy.CONTRARIAN

    def __post_init__(self):
        if not (0.0 < self.unit_gearing <= self.max_gearing):
            raise DataError(
                f"need 0 < unit_gearing <= max_gearing, got "
                f"{self.unit_gearing!r} / {self.max_gearing!r}"
            )


@dataclass(frozen=True, slots=True)
class Fill:
    """A position adjustment: signed quantity traded at a price."""

    intrinsic_index: int
    price: float
    quantity: float


@dataclass(frozen=True, slots=True)
class TrajectoryRecord:
    """Agent state after one event; unrealized pnl is marked at the event price."""

    intrinsic_index: int
    gearing: float
    entry_price: float
    unrealized_pnl: float
    realized_pnl: float


@dataclass(frozen=True)
class AgentTrajectory:
    """One record per processed event plus the final mark at the last price."""

    records: list[TrajectoryRecord]
    final_agent: Agent
    mark_price: float | None

    @property
    def final_realized(self) -> float:
        return self.final_agent.realized_pnl

    @property
    def final_unrealized(self) -> float:
        if self.mark_price is None:
            return 0.0
        return self.final_agent.unrealized_pnl(self.mark_price)

    @property
    def total_pnl(self) -> float:
        return self.final_realized + self.final_unrealized


def _apply_fill(agent: Agent, price: float, quantity: float) -> Agent:
    """General position accounting for a signed fill.

    Same-direction fills reweight the entry price; opposite-direction fills
    realize pnl on the closed quantity; crossing through zero realizes the
    whole position and opens the remainder at the fill price.
    """
    g = agent.gearing
    new_g = g + quantity
    if g == 0.0 or (g > 0.0) == (quantity > 0.0):
        entry = (agent.entry_price * g + price * quantity) / new_g
        return Agent(entry_price=entry, gearing=new_g, realized_pnl=agent.realized_pnl)
    if (g > 0.0 and new_g >= 0.0) or (g < 0.0 and new_g <= 0.0):
        realized = agent.realized_pnl + (-quantity) * (price - agent.entry_price)
        if new_g == 0.0:
            return Agent(entry_price=0.0, gearing=0.0, realized_pnl=realized)
        return Agent(entry_price=agent.entry_price, gearing=new_g, realized_pnl=realized)
    realized = agent.realized_pnl + g * (price - agent.entry_price)
    return Agent(entry_price=price, gearing=new_g, realized_pnl=realized)


def on_event(agent: Agent, rules: AgentRules, event: Event) -> tuple[Agent, Fill | None]:
    """Advance the agent by one event; returns the new agent and the fill, if any.

    Overshoot events adjust gearing by one unit (against the event's mode for
    the contrarian policy, with it for trend-following), capped at
    +-max_gearing. Directional-change events close the position.
    """
    price = event.price
    if event.kind is EventKind.DIRECTIONAL_CHANGE:
        if agent.gearing == 0.0:
            return agent, None
        quantity = -agent.gearing
        return _apply_fill(agent, price, quantity), Fill(
            event.intrinsic_index, price, quantity
        )
    lean = -1.0 if rules.direction_policy is DirectionPolicy.CONTRARIAN else 1.0
    direction = lean * (1.0 if event.mode is Mode.UP else -1.0)
    desired = agent.gearing + direction * rules.unit_gearing
    capped = min(rules.max_gearing, max(-rules.max_gearing, desired))
    quantity = capped - agent.gearing
    if quantity == 0.0:
        return agent, None
    return _apply_fill(agent, price, quantity), Fill(
        event.intrinsic_index, price, quantity
    )


def run_strategy(
    series: PriceSeries, config: DissectionConfig, rules: AgentRules
) -> AgentTrajectory:
    """Dissect the series and run the agent over the resulting event stream.

    Deterministic: identical inputs give an identical trajectory. The final
    unrealized pnl is marked at the last price of the series.
    """
    d = dissect(series, config)
    agent = Agent()
    records: list[TrajectoryRecord] = []
    for event in d.events:
        agent, _ = on_event(agent, rules, event)
        records.append(
            TrajectoryRecord(
                intrinsic_index=event.intrinsic_index,
                gearing=agent.gearing,
                entry_price=agent.entry_price,
                unrealized_pnl=agent.unrealized_pnl(event.price),
                realized_pnl=agent.realized_pnl,
            )
        )
    mark = float(series.price[-1]) if len(series) else None
    return AgentTrajectory(records=records, final_agent=agent, mark_price=mark)
