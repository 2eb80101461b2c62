from .actor_critic import (
    ACTION_COUNT,
    AgentHyperparams,
    AgentState,
    NetworkRole,
    Trainer,
    Transition,
    action_probabilities,
    create_agent,
    learn,
    run_episode,
    sample_action,
    select_action,
    td_error,
)

__all__ = [
    "ACTION_COUNT",
    "AgentHyperparams",
    "AgentState",
    "NetworkRole",
    "Trainer",
    "Transition",
    "action_probabilities",
    "create_agent",
    "learn",
    "run_episode",
    "sample_action",
    "select_action",
    "td_error",
]
