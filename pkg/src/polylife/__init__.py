"""Lifelong reinforcement learning with a fixed-size policy library.

Subpackages:
    nncore    minimal dense/LSTM network core with reverse-mode gradients
    envs      parametric Cartpole and POcman task families, task sequences
    learners  DQN/DRQN and PPO base-learners, replay buffer variants
    reuse     policy library, adaptive selector, lifetime control loop
    metrics   forgetting/transfer ratios, policy spread, task capacity
"""

__version__ = "0.1.0"
