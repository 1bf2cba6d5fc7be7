"""
Tile kernels. One prange iteration owns one tile: it writes only that
tile's pixels and the per-entry gradient rows of that tile's list, so the
passes are race-free and independent of the thread count.

mode 0 blends with the mask (masked rasterization); mode 1 multiplies the
mask into opacity before the alpha cutoff and blends with M = 1.
"""
import numpy as np
from numba import njit, prange
from app.gaussian.alpha import alpha_at, alpha_vjp

MASKED_BLEND = 0
MASK_OPACITY = 1


@njit(parallel=True, cache=True)
def forward_tiles(means2d, conics, colors, opacities, masks, entries, ranges,
                  tiles_x, tile_size, width, height, background,
                  alpha_min, alpha_max, early_stop, mode,
                  record, record_base, record_stride,
                  out_color, out_transmittance, out_count,
                  rec_entry, rec_alpha, rec_t, overflow):
    n_tiles = ranges.shape[0]
    for t in prange(n_tiles):
        x0 = (t % tiles_x) * tile_size
        y0 = (t // tiles_x) * tile_size
        start = ranges[t, 0]
        end = ranges[t, 1]
        for py in range(y0, min(y0 + tile_size, height)):
            for px in range(x0, min(x0 + tile_size, width)):
                local = (py - y0) * tile_size + (px - x0)
                base = record_base[t] + local * record_stride[t]
                trans = 1.0
                r = 0.0
                g = 0.0
                b = 0.0
                count = 0
                for e in range(start, end):
                    s = entries[e]
                    if mode == MASK_OPACITY:
                        o_eff = masks[s] * opacities[s]
                        m_blend = 1.0
                    else:
                        o_eff = opacities[s] * 1.0
                        m_blend = masks[s] * 1.0
                    alpha, falloff, clamped = alpha_at(px, py, means2d[s, 0], means2d[s, 1],
                                                       conics[s, 0], conics[s, 1], conics[s, 2],
                                                       o_eff, alpha_max)
                    if alpha < alpha_min:
                        continue
                    if record:
                        if count >= record_stride[t]:
                            overflow[t] += 1
                            break
                        rec_entry[base + count] = e
                        rec_alpha[base + count] = alpha
                        rec_t[base + count] = trans
                    count += 1
                    w = m_blend * alpha * trans
                    r += w * colors[s, 0]
                    g += w * colors[s, 1]
                    b += w * colors[s, 2]
                    trans = trans * (1.0 - m_blend * alpha)
                    if early_stop > 0.0 and trans < early_stop:
                        break
                out_color[py, px, 0] = r + trans * background[0]
                out_color[py, px, 1] = g + trans * background[1]
                out_color[py, px, 2] = b + trans * background[2]
                out_transmittance[py, px] = trans
                out_count[py, px] = count


@njit(cache=True)
def backward_pixel_core(alphas, transmittances, masks, colors, d_color, background,
                        final_t, denom_floor, out_mask, out_color, out_alpha):
    """
    Back-to-front pass over one pixel's contributors. b starts at zero and
    holds the color composited behind the current splat without background;
    the background enters through d final_t / d M_i. Returns the number of
    floored denominators.
    """
    bg_dot = d_color[0] * background[0] + d_color[1] * background[1] + d_color[2] * background[2]
    b0 = 0.0
    b1 = 0.0
    b2 = 0.0
    guarded = 0
    for k in range(alphas.shape[0] - 1, -1, -1):
        alpha = alphas[k]
        trans = transmittances[k]
        m = masks[k]
        c0 = colors[k, 0]
        c1 = colors[k, 1]
        c2 = colors[k, 2]
        diff = d_color[0] * (c0 - b0) + d_color[1] * (c1 - b1) + d_color[2] * (c2 - b2)
        denom = 1.0 - alpha * m
        if denom < denom_floor:
            denom = denom_floor
            guarded += 1
        bg_term = -final_t / denom * bg_dot
        out_mask[k] = alpha * trans * diff + alpha * bg_term
        out_alpha[k] = m * trans * diff + m * bg_term
        w = m * alpha * trans
        out_color[k, 0] = w * d_color[0]
        out_color[k, 1] = w * d_color[1]
        out_color[k, 2] = w * d_color[2]
        keep = 1.0 - m * alpha
        b0 = m * alpha * c0 + keep * b0
        b1 = m * alpha * c1 + keep * b1
        b2 = m * alpha * c2 + keep * b2
    return guarded


@njit(parallel=True, cache=True)
def backward_tiles(means2d, conics, colors, opacities, masks, entries, ranges,
                   tiles_x, tile_size, width, height, background,
                   alpha_max, denom_floor, mode,
                   record_base, record_stride, rec_entry, rec_alpha, rec_t,
                   final_transmittance, counts, d_image,
                   g_entry, guarded):
    """
    g_entry rows: [d_mask, d_r, d_g, d_b, d_opacity, d_mx, d_my, d_a, d_b_conic, d_c].
    """
    n_tiles = ranges.shape[0]
    for t in prange(n_tiles):
        x0 = (t % tiles_x) * tile_size
        y0 = (t // tiles_x) * tile_size
        stride = record_stride[t]
        alphas = np.empty(stride)
        trans = np.empty(stride)
        pix_masks = np.empty(stride)
        pix_colors = np.empty((stride, 3))
        d_mask = np.empty(stride)
        d_col = np.empty((stride, 3))
        d_alpha = np.empty(stride)
        chain = np.zeros(6)
        d_pixel = np.empty(3)
        for py in range(y0, min(y0 + tile_size, height)):
            for px in range(x0, min(x0 + tile_size, width)):
                n = counts[py, px]
                if n == 0:
                    continue
                local = (py - y0) * tile_size + (px - x0)
                base = record_base[t] + local * stride
                for k in range(n):
                    s = entries[rec_entry[base + k]]
                    alphas[k] = rec_alpha[base + k]
                    trans[k] = rec_t[base + k]
                    pix_masks[k] = 1.0 if mode == MASK_OPACITY else masks[s]
                    pix_colors[k, 0] = colors[s, 0]
                    pix_colors[k, 1] = colors[s, 1]
                    pix_colors[k, 2] = colors[s, 2]
                d_pixel[0] = d_image[py, px, 0]
                d_pixel[1] = d_image[py, px, 1]
                d_pixel[2] = d_image[py, px, 2]
                guarded[t] += backward_pixel_core(alphas[:n], trans[:n], pix_masks[:n], pix_colors[:n],
                                                  d_pixel, background, final_transmittance[py, px],
                                                  denom_floor, d_mask[:n], d_col[:n], d_alpha[:n])
                for k in range(n):
                    e = rec_entry[base + k]
                    s = entries[e]
                    mask = masks[s]
                    opacity = opacities[s]
                    o_eff = mask * opacity if mode == MASK_OPACITY else opacity * 1.0
                    alpha, falloff, clamped = alpha_at(px, py, means2d[s, 0], means2d[s, 1],
                                                       conics[s, 0], conics[s, 1], conics[s, 2],
                                                       o_eff, alpha_max)
                    g_entry[e, 1] += d_col[k, 0]
                    g_entry[e, 2] += d_col[k, 1]
                    g_entry[e, 3] += d_col[k, 2]
                    if mode == MASKED_BLEND:
                        g_entry[e, 0] += d_mask[k]
                    if clamped or d_alpha[k] == 0.0:
                        continue
                    for j in range(6):
                        chain[j] = 0.0
                    alpha_vjp(d_alpha[k], px, py, means2d[s, 0], means2d[s, 1],
                              conics[s, 0], conics[s, 1], conics[s, 2], alpha, falloff, chain)
                    if mode == MASK_OPACITY:
                        g_entry[e, 0] += chain[0] * opacity
                        g_entry[e, 4] += chain[0] * mask
                    else:
                        g_entry[e, 4] += chain[0]
                    for j in range(1, 6):
                        g_entry[e, 4 + j] += chain[j]
