class PlyConstants:
    VERTEX = 'vertex'
    POSITION = ('x', 'y', 'z')
    NORMAL = ('nx', 'ny', 'nz')
    DC_PREFIX = 'f_dc_'
    REST_PREFIX = 'f_rest_'
    OPACITY = 'opacity'
    SCALE_PREFIX = 'scale_'
    ROTATION_PREFIX = 'rot_'
    MASK_PREFIX = 'mask_logit_'
    FLOAT = 'f4'
