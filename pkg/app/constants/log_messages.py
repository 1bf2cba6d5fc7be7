class LogMessages:
    SKIPPED_SINGULAR = 'Skipped {} splats with singular 2D covariance.'
    CONTRIBUTOR_OVERFLOW = 'Contributor cap {} reached on {} pixels.'
    DENOM_GUARDED = 'Background-term denominator floored {} times.'
    PRUNED = 'Pruned {} -> {} Gaussians ({}).'
    DENSIFIED = 'Densified {} -> {} Gaussians (clone {}, split {}).'
    OPACITY_RESET = 'Opacity reset at iteration {}.'
    EVAL_POINT = 'iter {} | PSNR {:.3f} | SSIM {:.4f} | gaussians {}'
    CHECKPOINT_WRITTEN = 'Checkpoint written: {}'
    NON_FINITE = 'Non-finite {} at iteration {}: {}'
    GRADCHECK_CLASS = 'gradcheck {}: max {:.3e} mean {:.3e} skipped {}'
    EMPTY_GRADCHECK = 'gradcheck requested with zero scenes'
    PLY_LOADED = 'Loaded {} Gaussians from {}'
    PLY_WRITTEN = 'Wrote {} Gaussians to {}'
    MASK_DEFAULTED = 'PLY has no mask properties; mask logits set to {}'
    CONFIG_LOADED = 'Config loaded from {}'
    JIT_WARMUP = 'Compiling raster kernels...'
    MASK_LOSS_OFF = 'Mask sampling is on but lambda is zero for the whole run.'
    MASKS_FROZEN = 'Masks frozen at iteration {} with {} Gaussians.'
