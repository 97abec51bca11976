/* C interface for the scnet channel-mapping library. Generated; do not edit. */

#ifndef SCNET_H
#define SCNET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which model family to train.
 */
typedef enum ScnetModelKind {
  SCNET_MODEL_KIND_SCNET = 0,
  SCNET_MODEL_KIND_FNN = 1,
} ScnetModelKind;

/**
 * Outcome of a fallible call. Anything other than `OK` leaves a detail
 * message in [`scnet_last_error`].
 */
typedef enum ScnetStatus {
  SCNET_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SCNET_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  SCNET_STATUS_INVALID_UTF8 = 2,
  /**
   * Configuration or parameters violate an invariant.
   */
  SCNET_STATUS_CONFIG_ERROR = 3,
  /**
   * Buffer lengths or model/dataset dimensions do not line up.
   */
  SCNET_STATUS_SHAPE_ERROR = 4,
  /**
   * Underlying file-system failure.
   */
  SCNET_STATUS_IO_ERROR = 5,
  /**
   * A file exists but is not a usable artifact (magic, version,
   * truncation, or corrupt payload).
   */
  SCNET_STATUS_FORMAT_ERROR = 6,
  /**
   * Training produced a non-finite loss.
   */
  SCNET_STATUS_TRAINING_DIVERGED = 7,
  /**
   * An internal invariant failed; the library state is still consistent.
   */
  SCNET_STATUS_PANIC = 8,
} ScnetStatus;

/**
 * Opaque run configuration (preset plus overrides).
 */
typedef struct ScnetConfig ScnetConfig;

/**
 * Opaque sample collection with its generation metadata.
 */
typedef struct ScnetDataset ScnetDataset;

/**
 * Opaque trained model of either family.
 */
typedef struct ScnetModel ScnetModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the library as a static nul-terminated string.
 */
const char *scnet_version(void);

/**
 * Message describing the most recent failure on this thread, as a
 * nul-terminated string. Valid until the next failing call on the same
 * thread; never null (initially empty).
 */
const char *scnet_last_error(void);

/**
 * Creates a configuration from a named preset (`"paper"` or `"desk"`).
 *
 * # Safety
 * `preset` must be a nul-terminated string; `out` must point to writable
 * storage for one pointer.
 */
enum ScnetStatus scnet_config_new(const char *preset, struct ScnetConfig **out);

/**
 * Applies a TOML override document on top of an existing configuration.
 * On error the configuration is left unchanged.
 *
 * # Safety
 * `config` must be a live handle from `scnet_config_new`; `text` must be a
 * nul-terminated string.
 */
enum ScnetStatus scnet_config_overlay_toml(struct ScnetConfig *config, const char *text);

/**
 * Replaces the master seed that generation and training derive from.
 *
 * # Safety
 * `config` must be a live handle from `scnet_config_new`.
 */
enum ScnetStatus scnet_config_set_seed(struct ScnetConfig *config, uint64_t seed);

/**
 * Releases a configuration handle. Null is ignored.
 *
 * # Safety
 * `config` must be null or a live handle not freed before.
 */
void scnet_config_free(struct ScnetConfig *config);

/**
 * Generates the uplink/downlink sample collection the configuration
 * describes, deterministically in its master seed.
 *
 * # Safety
 * `config` must be a live handle; `out` must point to writable storage for
 * one pointer.
 */
enum ScnetStatus scnet_dataset_generate(const struct ScnetConfig *config,
                                        struct ScnetDataset **out);

/**
 * Loads a dataset file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must point to writable
 * storage for one pointer.
 */
enum ScnetStatus scnet_dataset_load(const char *path, struct ScnetDataset **out);

/**
 * Writes a dataset file (bit-exact round trip with `scnet_dataset_load`).
 *
 * # Safety
 * `dataset` must be a live handle; `path` must be a nul-terminated string.
 */
enum ScnetStatus scnet_dataset_save(const struct ScnetDataset *dataset, const char *path);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t scnet_dataset_len(const struct ScnetDataset *dataset);

/**
 * Complex entries per sample (the antenna count), or 0 for a null handle.
 *
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t scnet_dataset_dim(const struct ScnetDataset *dataset);

/**
 * Releases a dataset handle. Null is ignored.
 *
 * # Safety
 * `dataset` must be null or a live handle not freed before.
 */
void scnet_dataset_free(struct ScnetDataset *dataset);

/**
 * Trains a model of the requested family on the dataset, using the
 * configuration's split, architecture, optimizer settings, and master
 * seed. The dataset's antenna count must match the configuration. On
 * success, if `final_nmse` is non-null it receives the held-out NMSE of
 * the trained model.
 *
 * # Safety
 * `config` and `dataset` must be live handles; `out` must point to
 * writable storage for one pointer; `final_nmse` must be null or point to
 * writable storage for one double.
 */
enum ScnetStatus scnet_model_train(const struct ScnetConfig *config,
                                   const struct ScnetDataset *dataset,
                                   enum ScnetModelKind kind,
                                   struct ScnetModel **out,
                                   double *final_nmse);

/**
 * Loads a weight file of either family, detected from its magic bytes.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must point to writable
 * storage for one pointer.
 */
enum ScnetStatus scnet_model_load(const char *path, struct ScnetModel **out);

/**
 * Writes a weight file (bit-exact round trip with `scnet_model_load`).
 *
 * # Safety
 * `model` must be a live handle; `path` must be a nul-terminated string.
 */
enum ScnetStatus scnet_model_save(const struct ScnetModel *model, const char *path);

/**
 * Family name of the model as a static string (`"scnet"` or `"fnn"`), or
 * null for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
const char *scnet_model_kind_name(const struct ScnetModel *model);

/**
 * Complex entries per input/output sample, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t scnet_model_dim(const struct ScnetModel *model);

/**
 * Number of real parameter components, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t scnet_model_param_count(const struct ScnetModel *model);

/**
 * Applies the model to one complex sample. Both buffers hold
 * (real, imaginary) pairs, interleaved, so their length in doubles is
 * twice the model dimension; `input_len` and `output_len` say how many
 * doubles each buffer holds. The input is used as-is — callers working
 * with raw channel vectors apply their dataset's normalization first.
 *
 * # Safety
 * `model` must be a live handle; `input` must point to `input_len`
 * readable doubles and `output` to `output_len` writable doubles.
 */
enum ScnetStatus scnet_model_predict(const struct ScnetModel *model,
                                     const double *input,
                                     size_t input_len,
                                     double *output,
                                     size_t output_len);

/**
 * Mean relative squared error of the model's predictions over a dataset,
 * written to `out`.
 *
 * # Safety
 * `model` and `dataset` must be live handles; `out` must point to writable
 * storage for one double.
 */
enum ScnetStatus scnet_model_nmse(const struct ScnetModel *model,
                                  const struct ScnetDataset *dataset,
                                  double *out);

/**
 * Releases a model handle. Null is ignored.
 *
 * # Safety
 * `model` must be null or a live handle not freed before.
 */
void scnet_model_free(struct ScnetModel *model);

/**
 * Multiply count of a complex-valued network with the given layer widths,
 * weighting each complex multiply as four real ones. Returns 0 if `sizes`
 * is null or `n_sizes` < 2.
 *
 * # Safety
 * `sizes` must be null or point to `n_sizes` readable entries.
 */
uint64_t scnet_flops_complex(const size_t *sizes, size_t n_sizes);

/**
 * Real multiply count of a real-valued network with the given layer
 * widths. Returns 0 if `sizes` is null or `n_sizes` < 2.
 *
 * # Safety
 * `sizes` must be null or point to `n_sizes` readable entries.
 */
uint64_t scnet_flops_real(const size_t *sizes, size_t n_sizes);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCNET_H */
