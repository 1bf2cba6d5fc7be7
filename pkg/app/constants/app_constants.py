class AppConstants:
    PROJECT_NAME = 'masksplat'
    VERSION = '1.0.0'

    # gaussian-core
    COV2D_FLOOR = 0.3
    ALPHA_MIN = 1.0 / 255.0
    ALPHA_MAX = 0.99
    FOOTPRINT_SIGMAS = 3.0
    NEAR_CLIP = 0.2
    SH_OFFSET = 0.5
    MAX_SH_DEGREE = 3
    QUATERNION_EPS = 1e-12

    # raster
    TILE_SIZE = 16
    EARLY_STOP_T = 1e-4
    MAX_CONTRIBUTORS = 1024
    DENOM_FLOOR = 1e-8

    # mask-engine
    MASK_TEMPERATURE = 0.5
    MASK_INIT_LOGITS = (3.0, 0.0)
    MASK_LR = 0.01
    MASK_PRUNE_REPEATS = 10
    STE_THRESHOLD = 0.5
    GUMBEL_EPS = 1e-20

    # trainer
    ITERATIONS = 30000
    SSIM_WEIGHT = 0.2
    ADAM_BETAS = (0.9, 0.999)
    ADAM_EPS = 1e-15
    POSITION_LR_INIT = 0.00016
    POSITION_LR_FINAL = 0.0000016
    SH_DC_LR = 0.0025
    SH_REST_LR = 0.0025 / 20.0
    OPACITY_LR = 0.05
    SCALING_LR = 0.005
    ROTATION_LR = 0.001
    DENSIFY_FROM = 500
    DENSIFY_UNTIL = 15000
    DENSIFY_INTERVAL = 100
    DENSIFY_GRAD_THRESHOLD = 0.0002
    PERCENT_DENSE = 0.01
    SPLIT_FACTOR = 1.6
    MIN_OPACITY = 0.005
    MAX_SCREEN_RADIUS = 20.0
    MAX_WORLD_SCALE = 0.1
    OPACITY_RESET_INTERVAL = 3000
    OPACITY_RESET_VALUE = 0.01
    PRUNE_INTERVAL_AFTER_DENSIFY = 1000
    EVAL_INTERVAL = 500
    CHECKPOINT_INTERVAL = 5000

    # ssim
    SSIM_WINDOW = 11
    SSIM_SIGMA = 1.5
    SSIM_K1 = 0.01
    SSIM_K2 = 0.03

    # verify-oracle
    FD_STEP = 1e-5
    GRAD_FLOOR = 1e-6
    RELATIVE_FLOOR = 1e-3
    TOLERANCE_FLOAT64 = 1e-4
    TOLERANCE_FLOAT32 = 5e-2
    MASK_TOLERANCE_FLOAT64 = 1e-5
    SAMPLER_Z_LIMIT = 4.0
    SAMPLER_MIN_DRAWS = 1000

    # synthetic scene
    SCENE_N_GAUSSIANS = 64
    SCENE_N_CAMERAS = 10
    SCENE_WIDTH = 64
    SCENE_HEIGHT = 64
    SCENE_OVERPROVISION = 4
    SCENE_RADIUS = 4.0
    SCENE_EXTENT = 1.0
    SCENE_MAX_EVAL_VIEWS = 2
