/* LD_PRELOAD shim: log every pread/read on *.parquet files.
 *
 * Output line format: "<path> <offset> <length>\n" appended to the file
 * named by IO_TRACE_OUT. Offsets for plain read() are taken from the file
 * position before the call.
 */
#define _GNU_SOURCE
#include <dlfcn.h>
#include <fcntl.h>
#include <limits.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <unistd.h>

static ssize_t (*real_pread64)(int, void *, size_t, off_t);
static ssize_t (*real_read)(int, void *, size_t);
static int trace_fd = -2;

static void log_io(int fd, off_t offset, ssize_t len) {
    char linkpath[64], path[PATH_MAX], line[PATH_MAX + 64];
    if (len <= 0)
        return;
    if (trace_fd == -2) {
        const char *out = getenv("IO_TRACE_OUT");
        trace_fd = out ? open(out, O_WRONLY | O_CREAT | O_APPEND, 0644) : -1;
    }
    if (trace_fd < 0)
        return;
    snprintf(linkpath, sizeof linkpath, "/proc/self/fd/%d", fd);
    ssize_t n = readlink(linkpath, path, sizeof path - 1);
    if (n <= 8)
        return;
    path[n] = '\0';
    if (strcmp(path + n - 8, ".parquet") != 0)
        return;
    int m = snprintf(line, sizeof line, "%s %lld %zd\n", path, (long long)offset, len);
    if (m > 0 && write(trace_fd, line, (size_t)m) < 0)
        trace_fd = -1;
}

ssize_t pread64(int fd, void *buf, size_t count, off_t offset) {
    if (!real_pread64)
        real_pread64 = dlsym(RTLD_NEXT, "pread64");
    ssize_t r = real_pread64(fd, buf, count, offset);
    log_io(fd, offset, r);
    return r;
}

ssize_t pread(int fd, void *buf, size_t count, off_t offset)
    __attribute__((alias("pread64")));

ssize_t read(int fd, void *buf, size_t count) {
    if (!real_read)
        real_read = dlsym(RTLD_NEXT, "read");
    off_t pos = lseek(fd, 0, SEEK_CUR);
    ssize_t r = real_read(fd, buf, count);
    if (pos >= 0)
        log_io(fd, pos, r);
    return r;
}
