"""advpad: adversarial pre-padding for IP packets.

Reversible, protocol-compliant packet perturbations (TCP header field
rewriting plus payload-front byte insertion), an RL agent that optimizes
the inserted bytes against a traffic classifier, baseline perturbers, and
an evaluation harness.
"""

__version__ = "0.1.0"
