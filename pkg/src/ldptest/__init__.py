"""Locally private identity and independence testing of discrete distributions.

The package simulates noninteractive (simultaneous-message-passing) locally
differentially private protocols, with and without a shared public seed, and
ships the brute-force oracles that verify every closed form the testers rely
on at desk scale.
"""

from .channels import (
    OneBitChannel,
    RapporChannel,
    RapporParams,
    certify_ldp,
    hr_bit_channel,
    ldp_ratio,
    rappor_channel,
    rappor_params,
    rr_binary_channel,
    subset_then_rr,
)
from .dist import (
    Distribution,
    DomainMismatchError,
    JointDistribution,
    SignPattern,
    l2_distance_sq,
    marginals,
    paninski,
    point_mass,
    product,
    sample,
    tv_distance,
    uniform,
)
from .hadamard import HadamardSpec, column_sets, subset_mass, sylvester
from .identity import (
    IdentityGapMode,
    TestVerdict,
    amplify,
    binary_bias_test,
    hr_identity_test,
    mean_test_l2,
    public_coin_identity_test,
    rappor_counts,
    rappor_identity_test,
    rappor_statistic,
)
from .independence import (
    LearnedProduct,
    binary_independence_test,
    hr_frequency_estimate,
    private_coin_independence_test,
    public_coin_independence_test,
)
from .reduction import (
    BlockLayout,
    block_layout,
    block_lift,
    independence_hardness_instance,
    lift_sample,
    lift_samples,
)
from .rng import substream
from .smp import PublicSeed, Transcript, partition_players, run_private_coin, run_public_coin

__version__ = "0.1.0"
