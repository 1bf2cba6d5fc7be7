class AppMessages:
    CLI_DESCRIPTION = 'Masked-rasterization Gaussian splatting: train, prune, render and verify.'
    TRAIN_HELP = 'Train a Gaussian cloud with probabilistic masks.'
    RENDER_HELP = 'Render a PLY cloud for every camera of a manifest.'
    PRUNE_HELP = 'Fine-tune masks of an existing PLY and prune never-sampled Gaussians.'
    GRADCHECK_HELP = 'Compare analytic gradients with finite differences.'
    BENCH_HELP = 'Time the tiled renderer against the naive oracle.'
    STATS_HELP = 'Check Gumbel sampling frequencies against existence probabilities.'
    EXECUTED = 'Executed Successfully!'
    GRADCHECK_PASSED = 'Gradient check passed.'
    GRADCHECK_FAILED = 'Gradient check failed.'
    SAMPLER_PASSED = 'Sampler statistics within bounds.'
    SAMPLER_FAILED = 'Sampler statistics outside bounds.'
    EMPTY_GRADCHECK = 'No scenes requested; empty report.'
